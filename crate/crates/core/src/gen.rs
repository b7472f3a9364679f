//! Seeded generators for random states and observables, plus named fixtures.
//!
//! Everything here is deterministic for a fixed seed: sampling happens in
//! `f64` through a counter-based stream cipher and is converted to the
//! working scalar type afterwards, so `f32` and `f64` runs draw the same
//! underlying numbers.
//!
//! The named fixtures cover the recurring test states:
//!
//! * `bell`, `product`, `classical_classical`, `weakzero`: the 2x2 corner
//!   cases (maximal entanglement, uncorrelated product, perfectly correlated
//!   classical mixture, and the product state interrogated in a rotated
//!   basis).
//! * `example1`: a 2x3 pure state `(1/2)|0,0> + (1/2)|0,1> + (1/sqrt2)|1,2>`
//!   whose first two branches repeat the same distant state, with the
//!   complete standard-basis observable.
//! * `example2`: a 3x3 pure state in Schmidt form with coefficients
//!   `(0.5, 0.3, 0.2)` and the standard-basis observable aligned with the
//!   Schmidt vectors.
//! * `example3`: an equal mixture of those two pure states embedded on
//!   orthogonal sectors of a 5x6 space, interrogated in the basis built from
//!   the first state's Schmidt vector, its in-sector complement, the third
//!   level, and the second state's Schmidt vectors.
//! * `random_bipartite d1 d2 rank`: a seeded random state of the given rank
//!   with a random complete observable on side 2.

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{inner, vec_norm, CMatrix};
use crate::scalar::Scalar;
use crate::state::{BipartiteState, DensityMatrix, Observable};

fn sample_complex<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::real(re), T::real(im))
}

fn normalize<T: Scalar>(v: &mut [Complex<T>]) -> T {
    let norm = vec_norm(v);
    if norm > T::zero() {
        for z in v.iter_mut() {
            *z = *z / Complex::new(norm, T::zero());
        }
    }
    norm
}

/// Haar-distributed unitary: Gaussian columns orthonormalized in order.
pub fn random_unitary<T: Scalar, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix<T> {
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex<T>> = (0..dim).map(|_| sample_complex(rng)).collect();
        for _ in 0..2 {
            for b in &cols {
                let overlap = inner(b, &v);
                for (vi, bi) in v.iter_mut().zip(b.iter()) {
                    *vi = *vi - overlap * *bi;
                }
            }
        }
        if normalize(&mut v) < T::real(1e-8) {
            continue;
        }
        cols.push(v);
    }
    let mut u = CMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            u[(i, j)] = *z;
        }
    }
    u
}

/// Normalized Gaussian vector.
pub fn random_pure_vector<T: Scalar, R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
) -> Vec<Complex<T>> {
    loop {
        let mut v: Vec<Complex<T>> = (0..dim).map(|_| sample_complex(rng)).collect();
        if normalize(&mut v) >= T::real(1e-8) {
            return v;
        }
    }
}

/// Random state of the requested rank: `G G^dagger / tr`, with `G` a
/// `dim x rank` Gaussian matrix.
pub fn random_density<T: Scalar, R: Rng + ?Sized>(
    dim: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix<T>> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::InvalidState {
            reason: format!("cannot draw a rank-{rank} state on a {dim}-level system"),
        });
    }
    let mut g = CMatrix::zeros(dim, rank);
    for i in 0..dim {
        for j in 0..rank {
            g[(i, j)] = sample_complex(rng);
        }
    }
    let m = g.mul(&g.adjoint());
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_re(T::one() / tr).hermitian_part())
}

/// Random pure bipartite state.
pub fn random_pure_bipartite<T: Scalar, R: Rng + ?Sized>(
    d1: usize,
    d2: usize,
    rng: &mut R,
) -> Result<BipartiteState<T>> {
    if d1 == 0 || d2 == 0 {
        return Err(Error::InvalidState {
            reason: "zero-dimensional subsystem".into(),
        });
    }
    BipartiteState::from_pure(&random_pure_vector(d1 * d2, rng), d1, d2)
}

/// Random bipartite state of the requested joint rank.
pub fn random_bipartite<T: Scalar, R: Rng + ?Sized>(
    d1: usize,
    d2: usize,
    rank: usize,
    rng: &mut R,
) -> Result<BipartiteState<T>> {
    if d1 == 0 || d2 == 0 {
        return Err(Error::InvalidState {
            reason: "zero-dimensional subsystem".into(),
        });
    }
    BipartiteState::new(random_density(d1 * d2, rank, rng)?, d1, d2)
}

/// Complete observable in a Haar-random basis.
pub fn random_complete_observable<T: Scalar, R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
) -> Observable<T> {
    let u = random_unitary::<T, _>(dim, rng);
    let basis: Vec<Vec<Complex<T>>> = (0..dim)
        .map(|j| (0..dim).map(|i| u[(i, j)]).collect())
        .collect();
    Observable::from_basis(&basis).expect("orthonormal columns of a unitary")
}

/// Splits `0..n` into `parts` contiguous nonempty groups at random cuts.
fn random_composition<R: Rng + ?Sized>(n: usize, parts: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut cuts: Vec<usize> = rand::seq::index::sample(rng, n - 1, parts - 1)
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();
    cuts.push(n);
    let mut groups = Vec::with_capacity(parts);
    let mut start = 0;
    for cut in cuts {
        groups.push((start..cut).collect());
        start = cut;
    }
    groups
}

/// Random observable in a Haar-random eigenbasis with a random split of the
/// basis into between 2 and `dim` branches (trivial when `dim` is 1).
pub fn random_observable<T: Scalar, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Observable<T> {
    let u = random_unitary::<T, _>(dim, rng);
    if dim == 1 {
        return Observable::trivial(1);
    }
    let branch_count = rng.gen_range(2..=dim);
    let groups = random_composition(dim, branch_count, rng);
    let projectors = groups
        .into_iter()
        .map(|group| {
            let mut p = CMatrix::zeros(dim, dim);
            for j in group {
                let col: Vec<Complex<T>> = (0..dim).map(|i| u[(i, j)]).collect();
                p = p.add(&crate::linalg::outer(&col, &col));
            }
            p.hermitian_part()
        })
        .collect();
    Observable::from_projectors(projectors).expect("orthogonal groups of basis projectors")
}

/// A random observable together with a random merging of its branches:
/// returns `(coarse, fine)` with `fine` a structural refinement of `coarse`.
pub fn refinement_pair<T: Scalar, R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
) -> (Observable<T>, Observable<T>) {
    let fine = random_observable::<T, _>(dim, rng);
    let k = fine.branch_count();
    let parts = rng.gen_range(1..=k);
    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(rng);
    let projectors = random_composition(k, parts, rng)
        .into_iter()
        .map(|group| {
            let mut p = CMatrix::zeros(dim, dim);
            for slot in group {
                p = p.add(fine.projector(order[slot]));
            }
            p
        })
        .collect();
    let coarse = Observable::from_projectors(projectors).expect("merged branches stay orthogonal");
    (coarse, fine)
}

/// Named test states with canonical observables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fixture {
    Bell,
    Product,
    ClassicalClassical,
    WeakZero,
    Example1,
    Example2,
    Example3,
    RandomBipartite { d1: usize, d2: usize, rank: usize },
}

impl Fixture {
    /// Parses a fixture name, or `random_bipartite d1 d2 rank`.
    pub fn parse(text: &str) -> Result<Self> {
        let unknown = || Error::UnknownFixture {
            name: text.trim().to_string(),
        };
        let tokens: Vec<&str> = text.split_whitespace().collect();
        match tokens.as_slice() {
            ["bell"] => Ok(Self::Bell),
            ["product"] => Ok(Self::Product),
            ["classical_classical"] => Ok(Self::ClassicalClassical),
            ["weakzero"] => Ok(Self::WeakZero),
            ["example1"] => Ok(Self::Example1),
            ["example2"] => Ok(Self::Example2),
            ["example3"] => Ok(Self::Example3),
            ["random_bipartite", d1, d2, rank] => {
                let d1 = d1.parse().map_err(|_| unknown())?;
                let d2 = d2.parse().map_err(|_| unknown())?;
                let rank = rank.parse().map_err(|_| unknown())?;
                Ok(Self::RandomBipartite { d1, d2, rank })
            }
            _ => Err(unknown()),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Bell => "bell".into(),
            Self::Product => "product".into(),
            Self::ClassicalClassical => "classical_classical".into(),
            Self::WeakZero => "weakzero".into(),
            Self::Example1 => "example1".into(),
            Self::Example2 => "example2".into(),
            Self::Example3 => "example3".into(),
            Self::RandomBipartite { d1, d2, rank } => {
                format!("random_bipartite {d1} {d2} {rank}")
            }
        }
    }
}

impl std::str::FromStr for Fixture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

fn pure_from_entries<T: Scalar>(dim: usize, entries: &[(usize, f64)]) -> Vec<Complex<T>> {
    let mut v = vec![Complex::<T>::zero(); dim];
    for &(idx, amp) in entries {
        v[idx] = Complex::new(T::real(amp), T::zero());
    }
    v
}

fn product_state<T: Scalar>() -> BipartiteState<T> {
    let rho1 = DensityMatrix::new(CMatrix::from_diag(&[T::real(0.8), T::real(0.2)]))
        .expect("valid diagonal state");
    let rho2 = DensityMatrix::new(CMatrix::from_diag(&[T::real(0.7), T::real(0.3)]))
        .expect("valid diagonal state");
    BipartiteState::product(&rho1, &rho2)
}

fn rotated_qubit_basis<T: Scalar>() -> Observable<T> {
    let h = T::real(std::f64::consts::FRAC_1_SQRT_2);
    let plus = vec![Complex::new(h, T::zero()), Complex::new(h, T::zero())];
    let minus = vec![Complex::new(h, T::zero()), Complex::new(-h, T::zero())];
    Observable::from_basis(&[plus, minus]).expect("orthonormal rotated basis")
}

const SCHMIDT_WEIGHTS: [f64; 3] = [0.5, 0.3, 0.2];

fn example1_state<T: Scalar>() -> BipartiteState<T> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = pure_from_entries(6, &[(0, 0.5), (1, 0.5), (5, h)]);
    BipartiteState::from_pure(&v, 2, 3).expect("normalized fixture vector")
}

fn example2_state<T: Scalar>() -> BipartiteState<T> {
    let entries: Vec<(usize, f64)> = SCHMIDT_WEIGHTS
        .iter()
        .enumerate()
        .map(|(q, r)| (q * 3 + q, r.sqrt()))
        .collect();
    let v = pure_from_entries(9, &entries);
    BipartiteState::from_pure(&v, 3, 3).expect("normalized fixture vector")
}

fn example3_fixture<T: Scalar>() -> (BipartiteState<T>, Observable<T>) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // Side 1 levels: 0, 1 carry the first state, 2..5 the second.
    // Side 2 levels: 0, 1, 2 carry the first state, 3..6 the second.
    let phi = pure_from_entries::<T>(30, &[(0, 0.5), (1, 0.5), (6 + 2, h)]);
    let psi_entries: Vec<(usize, f64)> = SCHMIDT_WEIGHTS
        .iter()
        .enumerate()
        .map(|(q, r)| ((2 + q) * 6 + (3 + q), r.sqrt()))
        .collect();
    let psi = pure_from_entries::<T>(30, &psi_entries);
    let half = T::real(0.5);
    let mix = crate::linalg::outer(&phi, &phi)
        .scale_re(half)
        .add(&crate::linalg::outer(&psi, &psi).scale_re(half))
        .hermitian_part();
    let state = BipartiteState::new(
        DensityMatrix::new(mix).expect("mixture of two normalized vectors"),
        5,
        6,
    )
    .expect("30 = 5 x 6");

    let mut basis: Vec<Vec<Complex<T>>> = Vec::with_capacity(6);
    let unit = |idx: usize| {
        let mut v = vec![Complex::<T>::zero(); 6];
        v[idx] = Complex::one();
        v
    };
    let hh = T::real(h);
    let mut r1 = vec![Complex::<T>::zero(); 6];
    r1[0] = Complex::new(hh, T::zero());
    r1[1] = Complex::new(hh, T::zero());
    let mut r1_perp = vec![Complex::<T>::zero(); 6];
    r1_perp[0] = Complex::new(hh, T::zero());
    r1_perp[1] = Complex::new(-hh, T::zero());
    basis.push(r1);
    basis.push(r1_perp);
    basis.push(unit(2));
    basis.push(unit(3));
    basis.push(unit(4));
    basis.push(unit(5));
    let observable = Observable::from_basis(&basis).expect("orthonormal fixture basis");
    (state, observable)
}

/// Builds the named fixture: the state and its canonical side-2 observable.
/// `seed` only affects `random_bipartite`.
pub fn fixture_state<T: Scalar>(
    fixture: &Fixture,
    seed: u64,
) -> Result<(BipartiteState<T>, Observable<T>)> {
    match fixture {
        Fixture::Bell => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let v = pure_from_entries(4, &[(0, h), (3, h)]);
            Ok((
                BipartiteState::from_pure(&v, 2, 2)?,
                Observable::computational(2),
            ))
        }
        Fixture::Product => Ok((product_state(), Observable::computational(2))),
        Fixture::ClassicalClassical => {
            let diag = [T::real(0.5), T::zero(), T::zero(), T::real(0.5)];
            let rho = DensityMatrix::new(CMatrix::from_diag(&diag))?;
            Ok((
                BipartiteState::new(rho, 2, 2)?,
                Observable::computational(2),
            ))
        }
        Fixture::WeakZero => Ok((product_state(), rotated_qubit_basis())),
        Fixture::Example1 => Ok((example1_state(), Observable::computational(3))),
        Fixture::Example2 => Ok((example2_state(), Observable::computational(3))),
        Fixture::Example3 => Ok(example3_fixture()),
        Fixture::RandomBipartite { d1, d2, rank } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let state = random_bipartite(*d1, *d2, *rank, &mut rng)?;
            let observable = random_complete_observable(*d2, &mut rng);
            Ok((state, observable))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coarsen::{build_chain, refines};
    use crate::tol;

    type M = CMatrix<f64>;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn random_unitary_is_unitary_and_seeded() {
        for dim in 1..=6 {
            let u: M = random_unitary(dim, &mut rng(7));
            assert!(u
                .adjoint()
                .mul(&u)
                .approx_eq(&M::identity(dim), 1e-10));
        }
        let a: M = random_unitary(4, &mut rng(7));
        let b: M = random_unitary(4, &mut rng(7));
        let c: M = random_unitary(4, &mut rng(8));
        assert!(a.approx_eq(&b, 0.0));
        assert!(!a.approx_eq(&c, 1e-3));
    }

    #[test]
    fn random_density_controls_rank() {
        for rank in 1..=4 {
            let rho: DensityMatrix<f64> = random_density(4, rank, &mut rng(11)).unwrap();
            assert_eq!(rho.rank(tol::RANK), rank);
        }
        assert!(random_density::<f64, _>(3, 0, &mut rng(0)).is_err());
        assert!(random_density::<f64, _>(3, 4, &mut rng(0)).is_err());
    }

    #[test]
    fn random_pure_bipartite_is_pure() {
        let s: BipartiteState<f64> = random_pure_bipartite(2, 3, &mut rng(3)).unwrap();
        assert!((s.state().purity() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn random_complete_observable_has_rank_one_branches() {
        let a: Observable<f64> = random_complete_observable(4, &mut rng(5));
        assert_eq!(a.branch_count(), 4);
        assert!(a.is_complete());
    }

    #[test]
    fn random_observable_resolves_identity() {
        for seed in 0..10 {
            let a: Observable<f64> = random_observable(5, &mut rng(seed));
            assert!(a.branch_count() >= 2 && a.branch_count() <= 5);
            let sum = a
                .branches()
                .iter()
                .fold(M::zeros(5, 5), |acc, b| acc.add(&b.projector));
            assert!(sum.approx_eq(&M::identity(5), 1e-10));
        }
    }

    #[test]
    fn refinement_pairs_are_structural_refinements() {
        for seed in 0..10 {
            let (coarse, fine): (Observable<f64>, Observable<f64>) =
                refinement_pair(5, &mut rng(100 + seed));
            assert!(refines(&fine, &coarse, tol::STRUCTURE));
            assert!(fine.branch_count() >= coarse.branch_count());
        }
    }

    #[test]
    fn fixture_parsing_roundtrips() {
        for name in [
            "bell",
            "product",
            "classical_classical",
            "weakzero",
            "example1",
            "example2",
            "example3",
            "random_bipartite 2 3 4",
        ] {
            let f = Fixture::parse(name).unwrap();
            assert_eq!(f.name(), name);
        }
        assert!(matches!(
            Fixture::parse("ghz"),
            Err(Error::UnknownFixture { .. })
        ));
        assert!(matches!(
            Fixture::parse("random_bipartite 2 x 4"),
            Err(Error::UnknownFixture { .. })
        ));
        assert!(matches!(
            Fixture::parse("random_bipartite 2 3"),
            Err(Error::UnknownFixture { .. })
        ));
    }

    #[test]
    fn random_fixture_is_reproducible() {
        let fixture = Fixture::RandomBipartite {
            d1: 2,
            d2: 3,
            rank: 2,
        };
        let (s1, a1) = fixture_state::<f64>(&fixture, 42).unwrap();
        let (s2, a2) = fixture_state::<f64>(&fixture, 42).unwrap();
        let (s3, _) = fixture_state::<f64>(&fixture, 43).unwrap();
        assert!(s1.state().matrix().approx_eq(s2.state().matrix(), 0.0));
        assert!(a1.matrix().approx_eq(&a2.matrix(), 0.0));
        assert!(!s1.state().matrix().approx_eq(s3.state().matrix(), 1e-3));
    }

    #[test]
    fn first_example_merges_the_repeated_branches() {
        let (s, a) = fixture_state::<f64>(&Fixture::Example1, 0).unwrap();
        let chain = build_chain(&s, &a).unwrap();
        assert_eq!(chain.essential.branch_count(), 2);
        assert_eq!(chain.essential_partition.class_count(), 2);
        assert!((chain.essential_gain - 1.0).abs() < 1e-9);
        assert!((chain.ledger.redundant - 0.5).abs() < 1e-9);
    }

    #[test]
    fn second_example_chain_collapses_only_at_the_last_stage() {
        let (s, a) = fixture_state::<f64>(&Fixture::Example2, 0).unwrap();
        let chain = build_chain(&s, &a).unwrap();
        assert_eq!(chain.essential_partition.class_count(), 3);
        assert_eq!(chain.twin_partition.class_count(), 3);
        assert_eq!(chain.quasi_classical_partition.class_count(), 1);
        assert!(chain.quasi_classical.is_trivial());
        let h = 1.4854752972273343;
        assert!(chain.ledger.redundant.abs() < 1e-9);
        assert!(chain.ledger.essential.abs() < 1e-9);
        assert!(chain.ledger.garbled.abs() < 1e-9);
        assert!((chain.ledger.pure_quantum - h).abs() < 1e-9);
        assert!(chain.ledger.quasi_classical.abs() < 1e-9);
    }

    #[test]
    fn third_example_reproduces_the_two_block_structure() {
        let (s, a) = fixture_state::<f64>(&Fixture::Example3, 0).unwrap();
        assert_eq!(s.d1(), 5);
        assert_eq!(s.d2(), 6);
        let p = a.probabilities(&s.reduce2()).unwrap();
        assert!((p[0] - 0.25).abs() < 1e-12);
        assert!(p[1].abs() < 1e-12);
        assert!((p[2] - 0.25).abs() < 1e-12);
        assert!((p[3] - 0.25).abs() < 1e-12);
        assert!((p[4] - 0.15).abs() < 1e-12);
        assert!((p[5] - 0.10).abs() < 1e-12);
        let chain = build_chain(&s, &a).unwrap();
        assert_eq!(chain.essential_partition.class_count(), 5);
        assert_eq!(chain.twin_partition.class_count(), 5);
        assert_eq!(chain.quasi_classical_partition.class_count(), 2);
    }
}
