//! Ideal premeasurement of a subsystem-2 observable by a pointer system.
//!
//! The apparatus couples through the branch-controlled unitary
//! `U = sum_l P_l kron V_l`, where each `V_l` is a pointer unitary sending
//! the ready state `|phi>` to the pointer basis state `|l>`. Applying
//! `1 kron U` to `rho12 kron |phi><phi|` produces the final state
//!
//! ```text
//! rho^f = sum_{l,l'} (1 kron P_l) rho12 (1 kron P_l') kron |l><l'|
//! ```
//!
//! in which the pointer basis and the measured branches are twins: reading
//! the pointer is equivalent to interrogating the system, branch statistics
//! and conditional states are preserved, the lost coherence reappears as the
//! entropy increase of the measured pair, and dephasing the pointer
//! objectifies the outcome into `sum_l p_l rho12_l kron |l><l|`.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::info::{
    coherence, entropy_of_weights, mutual_info_decomposition, mutual_information,
    von_neumann_entropy,
};
use crate::linalg::{inner, outer, tensor_product, vec_norm, CMatrix};
use crate::scalar::Scalar;
use crate::state::{
    luders_mixture, BipartiteState, DensityMatrix, Observable, TripartiteState,
};
use crate::tol;

/// Pointer system coupled to an interrogation: its dimension, ready state,
/// and the eigenvalues announced per pointer level.
#[derive(Clone, Debug)]
pub struct ApparatusSpec<T = f64> {
    pointer_dim: usize,
    ready_state: Vec<Complex<T>>,
    pointer_eigenvalues: Vec<T>,
}

impl<T: Scalar> ApparatusSpec<T> {
    /// Validates dimensions, normalizes the ready state, and requires the
    /// announced eigenvalues to be separated.
    pub fn new(
        ready_state: Vec<Complex<T>>,
        pointer_eigenvalues: Vec<T>,
    ) -> Result<Self> {
        let pointer_dim = ready_state.len();
        if pointer_dim == 0 {
            return Err(Error::InvalidState {
                reason: "empty pointer ready state".into(),
            });
        }
        if pointer_eigenvalues.len() != pointer_dim {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "{} pointer eigenvalues for a {}-level pointer",
                    pointer_eigenvalues.len(),
                    pointer_dim
                ),
            });
        }
        let sep = T::real(tol::EIGENVALUE_SEPARATION);
        for i in 0..pointer_dim {
            for j in (i + 1)..pointer_dim {
                if (pointer_eigenvalues[i] - pointer_eigenvalues[j]).abs() <= sep {
                    return Err(Error::InvalidObservable {
                        reason: format!("pointer eigenvalues {i} and {j} not separated"),
                    });
                }
            }
        }
        let norm = vec_norm(&ready_state);
        if norm <= T::real(tol::DETECTABLE) {
            return Err(Error::InvalidState {
                reason: "pointer ready state has zero norm".into(),
            });
        }
        let ready_state = ready_state
            .into_iter()
            .map(|z| z / Complex::new(norm, T::zero()))
            .collect();
        Ok(Self {
            pointer_dim,
            ready_state,
            pointer_eigenvalues,
        })
    }

    /// Pointer with one level per branch of `a2`, ready state `|0>`, and
    /// eigenvalues `1, 2, ..`.
    pub fn standard(a2: &Observable<T>) -> Self {
        let dim = a2.branch_count();
        let mut ready = vec![Complex::zero(); dim];
        ready[0] = Complex::one();
        Self {
            pointer_dim: dim,
            ready_state: ready,
            pointer_eigenvalues: (1..=dim).map(|l| T::real(l as f64)).collect(),
        }
    }

    pub fn pointer_dim(&self) -> usize {
        self.pointer_dim
    }

    pub fn ready_state(&self) -> &[Complex<T>] {
        &self.ready_state
    }

    /// The pointer observable: standard basis levels with the announced
    /// eigenvalues.
    pub fn pointer_observable(&self) -> Observable<T> {
        let branches = (0..self.pointer_dim)
            .map(|l| {
                let mut v = vec![Complex::<T>::zero(); self.pointer_dim];
                v[l] = Complex::one();
                (self.pointer_eigenvalues[l], outer(&v, &v))
            })
            .collect();
        Observable::new(branches).expect("orthonormal pointer levels")
    }
}

/// Completes `first` to an orthonormal basis by Gram-Schmidt over the
/// standard basis, skipping candidates whose residual falls below `1e-10`.
fn basis_completion<T: Scalar>(first: &[Complex<T>]) -> Vec<Vec<Complex<T>>> {
    let dim = first.len();
    let norm = vec_norm(first);
    let mut basis = vec![first
        .iter()
        .map(|z| *z / Complex::new(norm, T::zero()))
        .collect::<Vec<_>>()];
    let skip = T::real(1e-10);
    for k in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = vec![Complex::<T>::zero(); dim];
        v[k] = Complex::one();
        for b in &basis {
            let overlap = inner(b, &v);
            for (vi, bi) in v.iter_mut().zip(b.iter()) {
                *vi = *vi - overlap * *bi;
            }
        }
        let residual = vec_norm(&v);
        if residual < skip {
            continue;
        }
        basis.push(
            v.into_iter()
                .map(|z| z / Complex::new(residual, T::zero()))
                .collect(),
        );
    }
    basis
}

/// Unitary on the pointer space sending the ready state to level `target`,
/// acting as the induced basis exchange elsewhere.
fn pointer_unitary<T: Scalar>(ready: &[Complex<T>], target: usize) -> CMatrix<T> {
    let dim = ready.len();
    let mut target_vec = vec![Complex::<T>::zero(); dim];
    target_vec[target] = Complex::one();
    let in_basis = basis_completion(ready);
    let out_basis = basis_completion(&target_vec);
    let mut u = CMatrix::zeros(dim, dim);
    for (o, i) in out_basis.iter().zip(in_basis.iter()) {
        u = u.add(&outer(o, i));
    }
    u
}

/// The branch-controlled coupling `U = sum_l P_l kron V_l` on the
/// system-pointer space, with `V_l |phi> = |l>`.
pub fn build_measurement_unitary<T: Scalar>(
    a2: &Observable<T>,
    apparatus: &ApparatusSpec<T>,
) -> Result<CMatrix<T>> {
    if apparatus.pointer_dim < a2.branch_count() {
        return Err(Error::DimensionMismatch {
            context: format!(
                "{}-level pointer cannot register {} branches",
                apparatus.pointer_dim,
                a2.branch_count()
            ),
        });
    }
    let dim = a2.dim() * apparatus.pointer_dim;
    let mut u = CMatrix::zeros(dim, dim);
    for (l, branch) in a2.branches().iter().enumerate() {
        let v_l = pointer_unitary(&apparatus.ready_state, l);
        u = u.add(&tensor_product(&branch.projector, &v_l));
    }
    Ok(u)
}

/// Outcome of coupling an apparatus to one interrogation.
#[derive(Clone, Debug)]
pub struct PremeasurementResult<T = f64> {
    pub apparatus: ApparatusSpec<T>,
    /// The system-pointer coupling unitary.
    pub unitary: CMatrix<T>,
    /// `(1 kron U) (rho12 kron ready) (1 kron U)^dagger` as `1 | 2 | pointer`.
    pub final_state: TripartiteState<T>,
    /// Pointer-level statistics of the final state, aligned with pointer
    /// levels.
    pub outcome_probabilities: Vec<T>,
}

/// Runs the ideal premeasurement of `a2` on subsystem 2 of `s`.
pub fn premeasure<T: Scalar>(
    s: &BipartiteState<T>,
    a2: &Observable<T>,
    apparatus: &ApparatusSpec<T>,
) -> Result<PremeasurementResult<T>> {
    if a2.dim() != s.d2() {
        return Err(Error::DimensionMismatch {
            context: format!("observable dim {} vs subsystem-2 dim {}", a2.dim(), s.d2()),
        });
    }
    let unitary = build_measurement_unitary(a2, apparatus)?;
    let ready = outer(&apparatus.ready_state, &apparatus.ready_state);
    let initial = tensor_product(s.state().matrix(), &ready);
    let coupling = tensor_product(&CMatrix::identity(s.d1()), &unitary);
    let final_matrix = coupling
        .mul(&initial)
        .mul(&coupling.adjoint())
        .hermitian_part();
    let final_state = TripartiteState::new(
        DensityMatrix::trusted(final_matrix),
        s.d1(),
        s.d2(),
        apparatus.pointer_dim,
    )?;
    let pointer_full = apparatus.pointer_observable().lift(s.d1() * s.d2());
    let outcome_probabilities = pointer_full.probabilities(final_state.state())?;
    Ok(PremeasurementResult {
        apparatus: apparatus.clone(),
        unitary,
        final_state,
        outcome_probabilities,
    })
}

/// Dephases the pointer, objectifying the record into
/// `sum_l p_l rho12_l kron |l><l|`.
pub fn collapse<T: Scalar>(r: &PremeasurementResult<T>) -> Result<TripartiteState<T>> {
    let [d1, d2, d3] = r.final_state.dims();
    let pointer_full = r.apparatus.pointer_observable().lift(d1 * d2);
    let dephased = luders_mixture(r.final_state.state(), &pointer_full)?;
    TripartiteState::new(dephased, d1, d2, d3)
}

/// Residuals of everything an ideal premeasurement must transfer: branch
/// statistics, conditional states, the unmeasured reduction, coherence
/// information, and the full mutual-information decomposition across the
/// `1 | (2, pointer)` split.
#[derive(Clone, Debug)]
pub struct InformationTransferReport<T = f64> {
    /// Largest gap between pointer statistics and branch probabilities
    /// (including stray weight on unused pointer levels).
    pub pointer_statistics_residual: T,
    /// Largest Frobenius distance between the measured pair conditioned on
    /// the pointer and the original conditional states.
    pub branch_state_residual: T,
    /// `||tr_{2,pointer} rho^f - rho1||`.
    pub unmeasured_reduction_residual: T,
    /// `I_C(1 kron A2, rho12)` before the coupling.
    pub coherence_original: T,
    /// `I_C` of the system observable in the final state.
    pub coherence_system_final: T,
    /// `I_C` of the pointer observable in the final state.
    pub coherence_pointer_final: T,
    /// `|I(1 : 2,pointer)^f - I(1:2)|`.
    pub mutual_info_residual: T,
    /// Largest term-by-term gap between the original decomposition and the
    /// final-state decompositions read through the system and through the
    /// pointer.
    pub decomposition_residual: T,
}

impl<T: Scalar> InformationTransferReport<T> {
    /// How far the three coherence informations differ.
    pub fn coherence_transfer_residual(&self) -> T {
        (self.coherence_system_final - self.coherence_original)
            .abs()
            .max((self.coherence_pointer_final - self.coherence_original).abs())
    }

    pub fn max_residual(&self) -> T {
        self.pointer_statistics_residual
            .max(self.branch_state_residual)
            .max(self.unmeasured_reduction_residual)
            .max(self.coherence_transfer_residual())
            .max(self.mutual_info_residual)
            .max(self.decomposition_residual)
    }

    pub fn check(&self, tol: T) -> Result<()> {
        let r = self.max_residual();
        if r > tol {
            return Err(Error::ToleranceExceeded {
                what: "information transfer".into(),
                residual: r.as_f64(),
                tol: tol.as_f64(),
            });
        }
        Ok(())
    }
}

/// Verifies that the coupling moved the interrogation onto the pointer
/// without disturbing what it was supposed to preserve.
pub fn information_transfer_report<T: Scalar>(
    s: &BipartiteState<T>,
    a2: &Observable<T>,
    r: &PremeasurementResult<T>,
) -> Result<InformationTransferReport<T>> {
    let d = mutual_info_decomposition(s, a2)?;
    let [d1, d2, d3] = r.final_state.dims();
    if d1 != s.d1() || d2 != s.d2() {
        return Err(Error::DimensionMismatch {
            context: format!(
                "premeasurement of a {}x{} state reported as {}x{}",
                s.d1(),
                s.d2(),
                d1,
                d2
            ),
        });
    }
    let pointer = r.apparatus.pointer_observable();
    let pointer_full = pointer.lift(d1 * d2);

    let mut pointer_statistics_residual = T::zero();
    for l in 0..d3 {
        let expected = if l < a2.branch_count() {
            d.probabilities[l]
        } else {
            T::zero()
        };
        pointer_statistics_residual =
            pointer_statistics_residual.max((r.outcome_probabilities[l] - expected).abs());
    }

    let mut branch_state_residual = T::zero();
    for (l, original) in d.conditional_states.iter().enumerate() {
        let Some(original) = original else { continue };
        let (_, cond) = r.final_state.conditional(pointer_full.projector(l));
        let cond = cond.ok_or_else(|| Error::InvalidState {
            reason: format!("pointer level {l} lost its branch weight"),
        })?;
        let measured_pair = cond.reduce(&[1, 2])?;
        let dist = measured_pair
            .matrix()
            .sub(original.state().matrix())
            .frobenius_norm();
        branch_state_residual = branch_state_residual.max(dist);
    }

    let unmeasured_reduction_residual = r
        .final_state
        .reduce(&[1])?
        .matrix()
        .sub(s.reduce1().matrix())
        .frobenius_norm();

    let system_full = a2.lift(d1).pad_right(d3);
    let coherence_original = coherence(&a2.lift(d1), s.state());
    let coherence_system_final = coherence(&system_full, r.final_state.state());
    let coherence_pointer_final = coherence(&pointer_full, r.final_state.state());

    let split = r.final_state.split_1_23();
    let mutual_info_residual = (mutual_information(&split) - d.mutual_information).abs();

    let mut decomposition_residual = T::zero();
    for side_obs in [a2.pad_right(d3), pointer.lift(d2)] {
        let df = mutual_info_decomposition(&split, &side_obs)?;
        decomposition_residual = decomposition_residual
            .max((df.information_gain - d.information_gain).abs())
            .max((df.discord - d.discord).abs())
            .max((df.residual - d.residual).abs());
    }

    Ok(InformationTransferReport {
        pointer_statistics_residual,
        branch_state_residual,
        unmeasured_reduction_residual,
        coherence_original,
        coherence_system_final,
        coherence_pointer_final,
        mutual_info_residual,
        decomposition_residual,
    })
}

/// Entropy bookkeeping of the premeasurement: where the destroyed coherence
/// reappears and what the pointer record costs.
#[derive(Clone, Debug)]
pub struct EntropyShiftReport<T = f64> {
    /// `S(tr_pointer rho^f)`: entropy of the measured pair afterwards.
    pub pair_entropy_final: T,
    /// `S(rho12)` before.
    pub pair_entropy_initial: T,
    /// `I_C(1 kron A2, rho12)`: the coherence the interrogation destroys.
    pub coherence: T,
    /// `H(p)` of the branch statistics.
    pub branch_entropy: T,
    /// `S(rho_pointer^f)`.
    pub pointer_entropy: T,
    /// `I((1,2) : pointer)` in the final state.
    pub pair_pointer_mutual_info: T,
    /// `sum_l p_l S(rho12_l) + H(p)`: the mixture route to the pair entropy.
    pub pair_entropy_bracket: T,
    /// `I_C` of the pointer observable in the final state.
    pub pointer_coherence_final: T,
    /// Largest `||rho^f (1 kron P_l kron 1) - rho^f (1 kron 1 kron |l><l|)||`:
    /// the system branches and pointer levels act as twins on the final
    /// state.
    pub twin_residual: T,
    /// `||L_pointer(rho^f) - sum_l p_l rho12_l kron |l><l| ||`.
    pub collapse_residual: T,
}

impl<T: Scalar> EntropyShiftReport<T> {
    /// `|S(pair final) - (S(pair initial) + coherence)|`.
    pub fn entropy_shift_residual(&self) -> T {
        (self.pair_entropy_final - (self.pair_entropy_initial + self.coherence)).abs()
    }

    /// `|S(pair final) - (sum_l p_l S(rho12_l) + H(p))|`.
    pub fn bracket_residual(&self) -> T {
        (self.pair_entropy_final - self.pair_entropy_bracket).abs()
    }

    /// `|I(pair : pointer) - (coherence + H(p))|`, also via the final-state
    /// pointer coherence.
    pub fn mutual_info_residual(&self) -> T {
        (self.pair_pointer_mutual_info - (self.coherence + self.branch_entropy))
            .abs()
            .max(
                (self.pair_pointer_mutual_info
                    - (self.pointer_coherence_final + self.branch_entropy))
                    .abs(),
            )
    }

    /// `|S(pointer) - H(p)|`.
    pub fn pointer_entropy_residual(&self) -> T {
        (self.pointer_entropy - self.branch_entropy).abs()
    }

    pub fn max_residual(&self) -> T {
        self.entropy_shift_residual()
            .max(self.bracket_residual())
            .max(self.mutual_info_residual())
            .max(self.pointer_entropy_residual())
            .max(self.twin_residual)
            .max(self.collapse_residual)
    }

    pub fn check(&self, tol: T) -> Result<()> {
        let r = self.max_residual();
        if r > tol {
            return Err(Error::ToleranceExceeded {
                what: "premeasurement entropy bookkeeping".into(),
                residual: r.as_f64(),
                tol: tol.as_f64(),
            });
        }
        Ok(())
    }
}

/// Verifies the entropy identities of the premeasurement and the
/// objectification of the record.
pub fn entropy_shift_report<T: Scalar>(
    s: &BipartiteState<T>,
    a2: &Observable<T>,
    r: &PremeasurementResult<T>,
) -> Result<EntropyShiftReport<T>> {
    let d = mutual_info_decomposition(s, a2)?;
    let [d1, d2, d3] = r.final_state.dims();
    let pointer = r.apparatus.pointer_observable();
    let pointer_full = pointer.lift(d1 * d2);

    let pair_final = r.final_state.reduce(&[1, 2])?;
    let pair_entropy_final = von_neumann_entropy(&pair_final);
    let pair_entropy_initial = von_neumann_entropy(s.state());
    let coherence_before = coherence(&a2.lift(d1), s.state());
    let branch_entropy = entropy_of_weights(&d.probabilities);
    let pointer_entropy = von_neumann_entropy(&r.final_state.reduce(&[3])?);
    let pair_pointer_mutual_info = mutual_information(&r.final_state.split_12_3());

    let mut pair_entropy_bracket = branch_entropy;
    for (l, cond) in d.conditional_states.iter().enumerate() {
        if let Some(cond) = cond {
            pair_entropy_bracket =
                pair_entropy_bracket + d.probabilities[l] * von_neumann_entropy(cond.state());
        }
    }

    let pointer_coherence_final = coherence(&pointer_full, r.final_state.state());

    let system_full = a2.lift(d1).pad_right(d3);
    let rho_f = r.final_state.state().matrix();
    let mut twin_residual = T::zero();
    for l in 0..a2.branch_count() {
        let via_system = rho_f.mul(system_full.projector(l));
        let via_pointer = rho_f.mul(pointer_full.projector(l));
        twin_residual = twin_residual.max(via_system.sub(&via_pointer).frobenius_norm());
    }

    let collapsed = collapse(r)?;
    let mut target = CMatrix::zeros(d1 * d2 * d3, d1 * d2 * d3);
    for (l, cond) in d.conditional_states.iter().enumerate() {
        if let Some(cond) = cond {
            let mut level = vec![Complex::<T>::zero(); d3];
            level[l] = Complex::one();
            let block = tensor_product(cond.state().matrix(), &outer(&level, &level));
            target = target.add(&block.scale_re(d.probabilities[l]));
        }
    }
    let collapse_residual = collapsed.state().matrix().sub(&target).frobenius_norm();

    Ok(EntropyShiftReport {
        pair_entropy_final,
        pair_entropy_initial,
        coherence: coherence_before,
        branch_entropy,
        pointer_entropy,
        pair_pointer_mutual_info,
        pair_entropy_bracket,
        pointer_coherence_final,
        twin_residual,
        collapse_residual,
    })
}
