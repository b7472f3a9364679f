//! Entropic information measures, in bits.
//!
//! The central quantity is the coherence information of an observable
//! `A = sum_l a_l P_l` in a state `rho`,
//!
//! ```text
//! I_C(A, rho) = S(L(rho)) - S(rho)          (entropy increase)
//!             = S(rho || L(rho))            (relative entropy)
//!             = H(p) + sum_l p_l S(rho_l) - S(rho)   (mixing gap)
//! ```
//!
//! where `L(rho) = sum_l P_l rho P_l`, `p_l = tr(rho P_l)`, and
//! `rho_l = P_l rho P_l / p_l`. For a bipartite state interrogated on
//! subsystem 2 the mutual information splits as
//!
//! ```text
//! I(1:2) = J + delta + sum_l p_l I(rho12_l)
//! J      = sum_l p_l S(rho1_l || rho1)
//! delta  = I_C(1 kron A2, rho12) - I_C(A2, rho2)
//! ```
//!
//! with every term nonnegative: an accessible information gain, a discord
//! part destroyed by interrogation, and residual correlations inside the
//! branches. All decompositions here expose the raw terms plus residuals of
//! the identities they must satisfy, so callers can enforce any tolerance.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{outer, CMatrix};
use crate::scalar::Scalar;
use crate::state::{
    conditional_state, luders_mixture, BipartiteState, DensityMatrix, Observable,
};
use crate::tol;

/// Floors a mathematically nonnegative quantity at zero; values below
/// `-1e-9` indicate a broken identity and trip a debug assertion.
pub(crate) fn nonneg<T: Scalar>(x: T) -> T {
    debug_assert!(
        x >= -T::validation_tol(1e-9),
        "nonnegative quantity fell to {:?}",
        x.as_f64()
    );
    x.max(T::zero())
}

fn xlog2x<T: Scalar>(x: T) -> T {
    if x > T::real(tol::ENTROPY_CUTOFF) {
        x * x.log2()
    } else {
        T::zero()
    }
}

/// Shannon entropy of an already-validated weight vector.
pub(crate) fn entropy_of_weights<T: Scalar>(ps: &[T]) -> T {
    nonneg(-ps.iter().fold(T::zero(), |acc, &p| acc + xlog2x(p)))
}

/// `H(p) = -sum p log2 p`, dropping weights at or below the entropy cutoff.
pub fn shannon_entropy<T: Scalar>(p: &[T]) -> Result<T> {
    let slack = T::validation_tol(tol::STATE);
    let mut sum = T::zero();
    for (i, &x) in p.iter().enumerate() {
        if x < -slack {
            return Err(Error::NotDistribution {
                reason: format!("entry {i} is {:.3e}", x.as_f64()),
            });
        }
        sum = sum + x;
    }
    if (sum - T::one()).abs() > slack {
        return Err(Error::NotDistribution {
            reason: format!("sum {:.12}", sum.as_f64()),
        });
    }
    Ok(entropy_of_weights(p))
}

/// `S(rho) = -tr(rho log2 rho)` via the spectrum, dropping eigenvalues at or
/// below the entropy cutoff.
pub fn von_neumann_entropy<T: Scalar>(rho: &DensityMatrix<T>) -> T {
    entropy_of_weights(&rho.eigenvalues())
}

/// `S(rho || sigma) = tr(rho log2 rho) - tr(rho log2 sigma)`, or `+inf` when
/// `rho` puts more than [`tol::SUPPORT`] Frobenius mass outside the support
/// of `sigma`.
pub fn relative_entropy<T: Scalar>(
    rho: &DensityMatrix<T>,
    sigma: &DensityMatrix<T>,
) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            context: format!("relative entropy: dims {} vs {}", rho.dim(), sigma.dim()),
        });
    }
    let eig_sigma = sigma.eigen();
    let cutoff = T::real(tol::ENTROPY_CUTOFF);

    // Support test: compress rho by the projector complementary to the range.
    let dim = rho.dim();
    let mut complement = CMatrix::identity(dim);
    for (i, &s) in eig_sigma.eigenvalues.iter().enumerate() {
        if s > cutoff {
            let v = eig_sigma.eigenvector(i);
            complement = complement.sub(&outer(&v, &v));
        }
    }
    let outside = complement
        .mul(rho.matrix())
        .mul(&complement)
        .frobenius_norm();
    if outside > T::real(tol::SUPPORT) {
        return Ok(T::infinity());
    }

    let mut value = rho
        .eigenvalues()
        .into_iter()
        .fold(T::zero(), |acc, lambda| acc + xlog2x(lambda));
    for (i, &s) in eig_sigma.eigenvalues.iter().enumerate() {
        if s > cutoff {
            let v = eig_sigma.eigenvector(i);
            let mass = quadratic_form(rho.matrix(), &v).max(T::zero());
            value = value - mass * s.log2();
        }
    }
    Ok(nonneg(value))
}

/// `<v| m |v>`, real part.
fn quadratic_form<T: Scalar>(m: &CMatrix<T>, v: &[Complex<T>]) -> T {
    let mv = m.matvec(v);
    crate::linalg::inner(v, &mv).re
}

/// The three equivalent expressions for coherence information.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoherenceMethod {
    /// `S(L(rho)) - S(rho)`.
    EntropyIncrease,
    /// `S(rho || L(rho))`.
    RelativeEntropy,
    /// `H(p) + sum_l p_l S(rho_l) - S(rho)`.
    MixingGap,
}

/// Coherence information `I_C(a, rho)` destroyed by a non-selective
/// interrogation of `a`.
pub fn coherence_information<T: Scalar>(
    a: &Observable<T>,
    rho: &DensityMatrix<T>,
    method: CoherenceMethod,
) -> Result<T> {
    if a.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            context: format!(
                "coherence information: observable dim {} vs state dim {}",
                a.dim(),
                rho.dim()
            ),
        });
    }
    let value = match method {
        CoherenceMethod::EntropyIncrease => {
            von_neumann_entropy(&luders_mixture(rho, a)?) - von_neumann_entropy(rho)
        }
        CoherenceMethod::RelativeEntropy => relative_entropy(rho, &luders_mixture(rho, a)?)?,
        CoherenceMethod::MixingGap => {
            let ps = a.probabilities(rho)?;
            let mut acc = entropy_of_weights(&ps);
            for branch in a.branches() {
                let (p, cond) = conditional_state(rho, &branch.projector);
                if let Some(cond) = cond {
                    acc = acc + p * von_neumann_entropy(&cond);
                }
            }
            acc - von_neumann_entropy(rho)
        }
    };
    Ok(nonneg(value))
}

/// Canonical coherence information (entropy-increase route).
pub(crate) fn coherence<T: Scalar>(a: &Observable<T>, rho: &DensityMatrix<T>) -> T {
    coherence_information(a, rho, CoherenceMethod::EntropyIncrease)
        .expect("dimensions checked by caller")
}

/// `I(1:2) = S(rho1) + S(rho2) - S(rho12)`.
pub fn mutual_information<T: Scalar>(s: &BipartiteState<T>) -> T {
    nonneg(
        von_neumann_entropy(&s.reduce1()) + von_neumann_entropy(&s.reduce2())
            - von_neumann_entropy(s.state()),
    )
}

fn check_subsystem2_observable<T: Scalar>(
    s: &BipartiteState<T>,
    a2: &Observable<T>,
) -> Result<()> {
    if a2.dim() != s.d2() {
        return Err(Error::DimensionMismatch {
            context: format!(
                "observable dim {} vs subsystem-2 dim {}",
                a2.dim(),
                s.d2()
            ),
        });
    }
    Ok(())
}

/// Discord of `a2` in `s`: coherence destroyed globally beyond what the
/// interrogation destroys locally,
/// `I_C(1 kron A2, rho12) - I_C(A2, rho2)`.
pub fn discord<T: Scalar>(s: &BipartiteState<T>, a2: &Observable<T>) -> Result<T> {
    check_subsystem2_observable(s, a2)?;
    let global = coherence(&a2.lift(s.d1()), s.state());
    let local = coherence(a2, &s.reduce2());
    Ok(nonneg(global - local))
}

/// Terms of the mutual-information split `I = J + delta + residual` for one
/// interrogating observable on subsystem 2.
#[derive(Clone, Debug)]
pub struct MutualInfoDecomposition<T = f64> {
    /// `I(1:2)` of the input state.
    pub mutual_information: T,
    /// Accessible gain `J = sum_l p_l S(rho1_l || rho1)`.
    pub information_gain: T,
    /// Discord `I_C(1 kron A2, rho12) - I_C(A2, rho2)`.
    pub discord: T,
    /// Residual correlations `sum_l p_l I(rho12_l)`.
    pub residual: T,
    /// Branch probabilities, aligned with the observable's branches.
    pub probabilities: Vec<T>,
    /// Conditional states per branch; `None` when undetectable.
    pub conditional_states: Vec<Option<BipartiteState<T>>>,
}

impl<T: Scalar> MutualInfoDecomposition<T> {
    /// `|I - (J + delta + residual)|`.
    pub fn identity_residual(&self) -> T {
        (self.mutual_information - (self.information_gain + self.discord + self.residual)).abs()
    }

    pub fn check(&self, tol: T) -> Result<()> {
        let r = self.identity_residual();
        if r > tol {
            return Err(Error::ToleranceExceeded {
                what: "mutual-information decomposition identity".into(),
                residual: r.as_f64(),
                tol: tol.as_f64(),
            });
        }
        Ok(())
    }
}

/// Splits `I(1:2)` into gain, discord, and residual correlations for the
/// interrogating observable `a2` on subsystem 2.
pub fn mutual_info_decomposition<T: Scalar>(
    s: &BipartiteState<T>,
    a2: &Observable<T>,
) -> Result<MutualInfoDecomposition<T>> {
    check_subsystem2_observable(s, a2)?;
    let lifted = a2.lift(s.d1());
    let probabilities = lifted.probabilities(s.state())?;
    let rho1 = s.reduce1();

    let mut conditional_states = Vec::with_capacity(a2.branch_count());
    let mut gain = T::zero();
    let mut residual = T::zero();
    for branch in lifted.branches() {
        let (p, cond) = s.conditional(&branch.projector);
        if let Some(cond) = &cond {
            gain = gain + p * relative_entropy(&cond.reduce1(), &rho1)?;
            residual = residual + p * mutual_information(cond);
        }
        conditional_states.push(cond);
    }

    Ok(MutualInfoDecomposition {
        mutual_information: mutual_information(s),
        information_gain: nonneg(gain),
        discord: discord(s, a2)?,
        residual: nonneg(residual),
        probabilities,
        conditional_states,
    })
}

/// Mutual information before and after a non-selective interrogation,
/// together with the pieces that must reassemble it.
#[derive(Clone, Debug)]
pub struct LudersMutualReport<T = f64> {
    /// `I(rho12)`.
    pub mutual_info_original: T,
    /// `I(L(rho12))` for the lifted observable.
    pub mutual_info_luders: T,
    /// Gain `J` of the interrogation.
    pub information_gain: T,
    /// `sum_l p_l I(rho12_l)`.
    pub residual_sum: T,
}

impl<T: Scalar> LudersMutualReport<T> {
    /// `|I(L(rho)) - (J + residual)|`.
    pub fn identity_residual(&self) -> T {
        (self.mutual_info_luders - (self.information_gain + self.residual_sum)).abs()
    }

    /// How far `I(L(rho)) <= I(rho)` is violated; zero when it holds.
    pub fn monotonicity_violation(&self) -> T {
        (self.mutual_info_luders - self.mutual_info_original).max(T::zero())
    }

    pub fn check(&self, tol: T) -> Result<()> {
        let r = self.identity_residual();
        if r > tol {
            return Err(Error::ToleranceExceeded {
                what: "post-interrogation mutual information identity".into(),
                residual: r.as_f64(),
                tol: tol.as_f64(),
            });
        }
        let m = self.monotonicity_violation();
        if m > T::real(1e-9) {
            return Err(Error::ToleranceExceeded {
                what: "mutual information grew under interrogation".into(),
                residual: m.as_f64(),
                tol: 1e-9,
            });
        }
        Ok(())
    }
}

/// Verifies that interrogation leaves exactly gain plus residual
/// correlations: `I(L(rho12)) = J + sum_l p_l I(rho12_l) <= I(rho12)`.
pub fn luders_mutual_info_check<T: Scalar>(
    s: &BipartiteState<T>,
    a2: &Observable<T>,
) -> Result<LudersMutualReport<T>> {
    let d = mutual_info_decomposition(s, a2)?;
    let dephased = BipartiteState::new(
        luders_mixture(s.state(), &a2.lift(s.d1()))?,
        s.d1(),
        s.d2(),
    )?;
    Ok(LudersMutualReport {
        mutual_info_original: d.mutual_information,
        mutual_info_luders: mutual_information(&dephased),
        information_gain: d.information_gain,
        residual_sum: d.residual,
    })
}

/// Decompositions for a coarse observable and one of its refinements, plus
/// the two-step route that must reproduce the refined terms.
#[derive(Clone, Debug)]
pub struct RefinementReport<T = f64> {
    pub coarse: MutualInfoDecomposition<T>,
    pub fine: MutualInfoDecomposition<T>,
    /// `J(coarse) + sum_l p_l J(fine | branch l)`.
    pub two_step_gain: T,
    /// `delta(coarse) + sum_l p_l delta(fine | branch l)`.
    pub two_step_discord: T,
    /// `sum_l p_l residual(fine | branch l)`.
    pub two_step_residual: T,
}

impl<T: Scalar> RefinementReport<T> {
    /// Largest deviation of the two-step terms from the direct refined terms.
    pub fn bracket_residual(&self) -> T {
        let g = (self.two_step_gain - self.fine.information_gain).abs();
        let d = (self.two_step_discord - self.fine.discord).abs();
        let r = (self.two_step_residual - self.fine.residual).abs();
        g.max(d).max(r)
    }

    /// How far gain or discord fail to grow, or residual fails to shrink,
    /// under refinement; zero when all three are monotone.
    pub fn monotonicity_violation(&self) -> T {
        let g = self.coarse.information_gain - self.fine.information_gain;
        let d = self.coarse.discord - self.fine.discord;
        let r = self.fine.residual - self.coarse.residual;
        g.max(d).max(r).max(T::zero())
    }

    pub fn check(&self, tol: T) -> Result<()> {
        let r = self.bracket_residual();
        if r > tol {
            return Err(Error::ToleranceExceeded {
                what: "two-step refinement identity".into(),
                residual: r.as_f64(),
                tol: tol.as_f64(),
            });
        }
        let m = self.monotonicity_violation();
        if m > T::real(1e-9) {
            return Err(Error::ToleranceExceeded {
                what: "refinement monotonicity".into(),
                residual: m.as_f64(),
                tol: 1e-9,
            });
        }
        Ok(())
    }
}

/// Checks that every detectable branch of `coarse` is a sum of `fine`
/// branches, with `rho2` deciding detectability.
fn verify_refinement<T: Scalar>(
    rho2: &DensityMatrix<T>,
    coarse: &Observable<T>,
    fine: &Observable<T>,
) -> Result<()> {
    let slack = T::real(tol::STRUCTURE);
    let ps = coarse.probabilities(rho2)?;
    let detectable: Vec<usize> = (0..coarse.branch_count())
        .filter(|&l| ps[l] > T::real(tol::DETECTABLE))
        .collect();
    let mut undetectable_region = CMatrix::identity(coarse.dim());
    for &l in &detectable {
        undetectable_region = undetectable_region.sub(coarse.projector(l));
    }

    let mut sums: Vec<CMatrix<T>> = detectable
        .iter()
        .map(|_| CMatrix::zeros(coarse.dim(), coarse.dim()))
        .collect();
    for (q, fb) in fine.branches().iter().enumerate() {
        let inside = detectable.iter().position(|&l| {
            coarse
                .projector(l)
                .mul(&fb.projector)
                .approx_eq(&fb.projector, slack)
        });
        match inside {
            Some(pos) => sums[pos] = sums[pos].add(&fb.projector),
            None => {
                let stays_outside = undetectable_region
                    .mul(&fb.projector)
                    .approx_eq(&fb.projector, slack);
                if !stays_outside {
                    return Err(Error::NotARefinement {
                        reason: format!("branch {q} straddles detectable branches"),
                    });
                }
            }
        }
    }
    for (pos, &l) in detectable.iter().enumerate() {
        if !sums[pos].approx_eq(coarse.projector(l), slack) {
            return Err(Error::NotARefinement {
                reason: format!("detectable branch {l} is not a sum of refined branches"),
            });
        }
    }
    Ok(())
}

/// Decomposes `I(1:2)` for a coarse observable and a state-dependent
/// refinement of it, verifying that refining in two steps reproduces the
/// refined terms and that gain and discord grow while residual shrinks.
pub fn refinement_decomposition<T: Scalar>(
    s: &BipartiteState<T>,
    coarse: &Observable<T>,
    fine: &Observable<T>,
) -> Result<RefinementReport<T>> {
    check_subsystem2_observable(s, coarse)?;
    check_subsystem2_observable(s, fine)?;
    verify_refinement(&s.reduce2(), coarse, fine)?;

    let coarse_d = mutual_info_decomposition(s, coarse)?;
    let fine_d = mutual_info_decomposition(s, fine)?;

    let mut two_step_gain = coarse_d.information_gain;
    let mut two_step_discord = coarse_d.discord;
    let mut two_step_residual = T::zero();
    for (l, cond) in coarse_d.conditional_states.iter().enumerate() {
        let Some(cond) = cond else { continue };
        let p = coarse_d.probabilities[l];
        let inner = mutual_info_decomposition(cond, fine)?;
        two_step_gain = two_step_gain + p * inner.information_gain;
        two_step_discord = two_step_discord + p * inner.discord;
        two_step_residual = two_step_residual + p * inner.residual;
    }

    Ok(RefinementReport {
        coarse: coarse_d,
        fine: fine_d,
        two_step_gain,
        two_step_discord,
        two_step_residual,
    })
}

/// Joint split of both subsystem entropies and the mutual information over
/// one interrogation:
///
/// ```text
/// S1  = sum_l p_l S(rho1_l) + J
/// I12 = J + delta + sum_l p_l I(rho12_l)
/// S2  = H(p) - I_C(A2, rho2) + sum_l p_l S(rho2_l)
/// S12 = S1 - I12 + S2
/// ```
#[derive(Clone, Debug)]
pub struct EntropyDecomposition<T = f64> {
    /// `sum_l p_l S(rho1_l)`.
    pub residual_s1: T,
    /// Gain `J`.
    pub information_gain: T,
    pub discord: T,
    /// `sum_l p_l I(rho12_l)`.
    pub residual_correlations: T,
    /// `H(p_l)`.
    pub branch_entropy: T,
    /// `I_C(A2, rho2)`.
    pub local_coherence: T,
    /// `sum_l p_l S(rho2_l)`.
    pub residual_s2: T,
    pub s1: T,
    pub s2: T,
    pub s12: T,
    pub mutual_information: T,
}

impl<T: Scalar> EntropyDecomposition<T> {
    pub fn s1_residual(&self) -> T {
        (self.s1 - (self.residual_s1 + self.information_gain)).abs()
    }

    pub fn mutual_residual(&self) -> T {
        (self.mutual_information
            - (self.information_gain + self.discord + self.residual_correlations))
            .abs()
    }

    pub fn s2_residual(&self) -> T {
        (self.s2 - (self.branch_entropy - self.local_coherence + self.residual_s2)).abs()
    }

    /// Joint entropy reassembled from the three bracket sums vs directly.
    pub fn s12_residual(&self) -> T {
        let s1 = self.residual_s1 + self.information_gain;
        let i12 = self.information_gain + self.discord + self.residual_correlations;
        let s2 = self.branch_entropy - self.local_coherence + self.residual_s2;
        (self.s12 - (s1 - i12 + s2)).abs()
    }

    pub fn max_residual(&self) -> T {
        self.s1_residual()
            .max(self.mutual_residual())
            .max(self.s2_residual())
            .max(self.s12_residual())
    }

    pub fn check(&self, tol: T) -> Result<()> {
        let r = self.max_residual();
        if r > tol {
            return Err(Error::ToleranceExceeded {
                what: "subsystem entropy decomposition".into(),
                residual: r.as_f64(),
                tol: tol.as_f64(),
            });
        }
        Ok(())
    }
}

/// Computes the joint subsystem-entropy split for one interrogation.
pub fn subsystem_entropy_decomposition<T: Scalar>(
    s: &BipartiteState<T>,
    a2: &Observable<T>,
) -> Result<EntropyDecomposition<T>> {
    let d = mutual_info_decomposition(s, a2)?;
    let rho2 = s.reduce2();

    let mut residual_s1 = T::zero();
    let mut residual_s2 = T::zero();
    for (l, cond) in d.conditional_states.iter().enumerate() {
        let Some(cond) = cond else { continue };
        let p = d.probabilities[l];
        residual_s1 = residual_s1 + p * von_neumann_entropy(&cond.reduce1());
        residual_s2 = residual_s2 + p * von_neumann_entropy(&cond.reduce2());
    }

    Ok(EntropyDecomposition {
        residual_s1,
        information_gain: d.information_gain,
        discord: d.discord,
        residual_correlations: d.residual,
        branch_entropy: entropy_of_weights(&d.probabilities),
        local_coherence: coherence(a2, &rho2),
        residual_s2,
        s1: von_neumann_entropy(&s.reduce1()),
        s2: von_neumann_entropy(&rho2),
        s12: von_neumann_entropy(s.state()),
        mutual_information: d.mutual_information,
    })
}

/// Finite weighted mixture of density matrices on one space. Zero-weight
/// components carry no state.
#[derive(Clone, Debug)]
pub struct Mixture<T = f64> {
    components: Vec<(T, Option<DensityMatrix<T>>)>,
    dim: usize,
}

impl<T: Scalar> Mixture<T> {
    /// Validates weights (nonnegative within `1e-10`, summing to 1 within
    /// `1e-10`) and uniform dimensions; weights at or below the
    /// detectability threshold drop their state.
    pub fn new(components: Vec<(T, DensityMatrix<T>)>) -> Result<Self> {
        Self::with_gaps(
            components
                .into_iter()
                .map(|(w, rho)| (w, Some(rho)))
                .collect(),
        )
    }

    /// As [`Mixture::new`], but detectable components must carry a state
    /// while undetectable entries may be bare weights.
    pub fn with_gaps(components: Vec<(T, Option<DensityMatrix<T>>)>) -> Result<Self> {
        let slack = T::validation_tol(tol::STATE);
        let detectable = T::real(tol::DETECTABLE);
        if components.is_empty() {
            return Err(Error::InvalidMixture {
                reason: "no components".into(),
            });
        }
        let mut dim = 0usize;
        let mut sum = T::zero();
        for (i, (w, rho)) in components.iter().enumerate() {
            if *w < -slack {
                return Err(Error::InvalidMixture {
                    reason: format!("weight {i} is {:.3e}", w.as_f64()),
                });
            }
            sum = sum + *w;
            if let Some(rho) = rho {
                if dim == 0 {
                    dim = rho.dim();
                } else if rho.dim() != dim {
                    return Err(Error::InvalidMixture {
                        reason: format!("component {i} has dim {} vs {}", rho.dim(), dim),
                    });
                }
            } else if *w > detectable {
                return Err(Error::InvalidMixture {
                    reason: format!("detectable component {i} carries no state"),
                });
            }
        }
        if dim == 0 {
            return Err(Error::InvalidMixture {
                reason: "no detectable component".into(),
            });
        }
        if (sum - T::one()).abs() > slack {
            return Err(Error::InvalidMixture {
                reason: format!("weights sum to {:.12}", sum.as_f64()),
            });
        }
        let components = components
            .into_iter()
            .map(|(w, rho)| {
                let w = w.max(T::zero());
                if w > detectable {
                    (w, rho)
                } else {
                    (w, None)
                }
            })
            .collect();
        Ok(Self { components, dim })
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self) -> Vec<T> {
        self.components.iter().map(|(w, _)| *w).collect()
    }

    /// Detectable `(weight, state)` pairs with their component index.
    pub fn detectable(&self) -> impl Iterator<Item = (usize, T, &DensityMatrix<T>)> {
        self.components
            .iter()
            .enumerate()
            .filter_map(|(i, (w, rho))| rho.as_ref().map(|r| (i, *w, r)))
    }

    /// `sum_k w_k rho_k`.
    pub fn average(&self) -> DensityMatrix<T> {
        let mut acc = CMatrix::zeros(self.dim, self.dim);
        for (_, w, rho) in self.detectable() {
            acc = acc.add(&rho.matrix().scale_re(w));
        }
        DensityMatrix::trusted(acc)
    }
}

/// Information gain of resolving a mixture: returns `(J, H(w))` where
/// `J = S(avg) - sum_k w_k S(rho_k) = sum_k w_k S(rho_k || avg)`.
pub fn mixture_information_gain<T: Scalar>(m: &Mixture<T>) -> Result<(T, T)> {
    let avg = m.average();
    let mut weighted_entropy = T::zero();
    for (_, w, rho) in m.detectable() {
        weighted_entropy = weighted_entropy + w * von_neumann_entropy(rho);
    }
    let gain = nonneg(von_neumann_entropy(&avg) - weighted_entropy);

    #[cfg(debug_assertions)]
    {
        let mut divergence_route = T::zero();
        for (_, w, rho) in m.detectable() {
            divergence_route = divergence_route + w * relative_entropy(rho, &avg)?;
        }
        debug_assert!(
            (gain - divergence_route).abs() <= T::validation_tol(tol::IDENTITY),
            "mixture gain routes disagree: {:?} vs {:?}",
            gain.as_f64(),
            divergence_route.as_f64()
        );
    }

    Ok((gain, entropy_of_weights(&m.weights())))
}

/// Weights of the pure-state refinement of a mixture: each component's
/// weight spread over its spectrum. Useful as the majorized side of
/// spectrum comparisons.
pub fn pure_refinement_weights<T: Scalar>(m: &Mixture<T>) -> Vec<T> {
    let cutoff = T::real(tol::ENTROPY_CUTOFF);
    let mut out = Vec::new();
    for (_, w, rho) in m.detectable() {
        for lambda in rho.eigenvalues() {
            if lambda > cutoff {
                out.push(w * lambda);
            }
        }
    }
    out
}

/// Whether `p` is majorized by `q`: descending partial sums of `p` never
/// exceed those of `q` (within `1e-10`). Shorter vectors are zero-padded.
pub fn majorization_check<T: Scalar>(p: &[T], q: &[T]) -> Result<bool> {
    let validate = |v: &[T]| -> Result<Vec<T>> {
        let slack = T::validation_tol(tol::STATE);
        let mut sum = T::zero();
        for &x in v {
            if x < -slack {
                return Err(Error::NotDistribution {
                    reason: format!("entry {:.3e}", x.as_f64()),
                });
            }
            sum = sum + x;
        }
        if (sum - T::one()).abs() > slack {
            return Err(Error::NotDistribution {
                reason: format!("sum {:.12}", sum.as_f64()),
            });
        }
        let mut sorted: Vec<T> = v.to_vec();
        sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite weights"));
        Ok(sorted)
    };
    let ps = validate(p)?;
    let qs = validate(q)?;
    let n = ps.len().max(qs.len());
    let slack = T::validation_tol(tol::STATE);
    let mut p_acc = T::zero();
    let mut q_acc = T::zero();
    for i in 0..n {
        p_acc = p_acc + ps.get(i).copied().unwrap_or_else(T::zero);
        q_acc = q_acc + qs.get(i).copied().unwrap_or_else(T::zero);
        if p_acc > q_acc + slack {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Tests the two sides of gain saturation: returns
/// `(J = H(w) within tol, pairwise trace overlaps below [`tol::STRUCTURE`])`.
/// For valid mixtures the two flags agree.
pub fn orthogonality_from_saturation<T: Scalar>(m: &Mixture<T>, tol_bits: T) -> Result<(bool, bool)> {
    let (gain, weight_entropy) = mixture_information_gain(m)?;
    let saturates = (gain - weight_entropy).abs() <= tol_bits;

    let detectable: Vec<_> = m.detectable().collect();
    let mut orthogonal = true;
    for (i, (_, _, rho_i)) in detectable.iter().enumerate() {
        for (_, _, rho_j) in detectable.iter().skip(i + 1) {
            let overlap = rho_i.matrix().mul(rho_j.matrix()).trace().re.abs();
            if overlap > T::real(tol::STRUCTURE) {
                orthogonal = false;
            }
        }
    }
    Ok((saturates, orthogonal))
}

/// Conditional entropy `S(1|2) = S(rho12) - S(rho2)` and the discord floor
/// `max(0, I(1:2) - S(rho1))` it induces.
pub fn conditional_entropy_bound<T: Scalar>(s: &BipartiteState<T>) -> (T, T) {
    let s12 = von_neumann_entropy(s.state());
    let s2 = von_neumann_entropy(&s.reduce2());
    let conditional = s12 - s2;
    (conditional, (-conditional).max(T::zero()))
}

/// Grid minimization of discord over complete qubit observables on
/// subsystem 2. Samples `resolution^2` points of the polar/azimuthal grid
/// plus the standard basis, and returns the best discord with its basis.
pub fn min_discord_grid<T: Scalar>(
    s: &BipartiteState<T>,
    resolution: usize,
) -> Result<(T, Observable<T>)> {
    if s.d2() != 2 {
        return Err(Error::UnsupportedDimension {
            dim: s.d2(),
            context: "discord grid search requires a qubit subsystem 2".into(),
        });
    }
    let resolution = resolution.max(1);
    let mut best = discord(s, &Observable::computational(2))?;
    let mut best_obs = Observable::computational(2);
    for i in 0..resolution {
        let theta = T::PI() * T::real((i as f64) + 0.5) / T::real(resolution as f64);
        for j in 0..resolution {
            let phi = T::real(2.0) * T::PI() * T::real(j as f64) / T::real(resolution as f64);
            let (half_sin, half_cos) = ((theta / T::real(2.0)).sin(), (theta / T::real(2.0)).cos());
            let e_phi = Complex::new(phi.cos(), phi.sin());
            let v = vec![
                Complex::new(half_cos, T::zero()),
                e_phi * half_sin,
            ];
            let v_perp = vec![
                e_phi.conj() * -half_sin,
                Complex::new(half_cos, T::zero()),
            ];
            let obs = Observable::from_basis(&[v, v_perp])?;
            let d = discord(s, &obs)?;
            if d < best {
                best = d;
                best_obs = obs;
            }
        }
    }
    Ok((best, best_obs))
}
