//! Coarsening chains for interrogating observables.
//!
//! Starting from an observable `A` on subsystem 2 of a bipartite state, three
//! successive coarsenings split the branch entropy `H(p)` into noise grades:
//!
//! * the essential coarsening merges detectable branches whose conditional
//!   subsystem-1 reductions coincide (information `A` repeats is redundant),
//! * the twin coarsening chains branches whose reductions have overlapping
//!   supports, leaving classes that are perfectly distinguishable on
//!   subsystem 1 and therefore carry a twin observable over there,
//! * the quasi-classical coarsening chains branches coupled through the
//!   joint state, leaving blocks that commute with it.
//!
//! Each stage is a structural coarsening of the previous one, so Lueders
//! dephasings compose as `L_fine . L_coarse = L_fine` and coherence
//! information telescopes along the chain. Merged projectors keep only
//! detectable branches; whenever those do not already resolve the identity a
//! complement projector is appended as an extra undetectable branch, which
//! carries no probability and leaves every dephasing and entropy unchanged.

use crate::error::{Error, Result};
use crate::info::{
    coherence, entropy_of_weights, mutual_info_decomposition, nonneg, Mixture,
};
use crate::linalg::{commutator_norm, tensor_product, CMatrix};
use crate::scalar::Scalar;
use crate::state::{luders_mixture, range_projector, BipartiteState, DensityMatrix, Observable};
use crate::tol;

/// A partition of a finite index set into disjoint classes. Members are kept
/// sorted and classes are ordered by their smallest member, so equal
/// partitions compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    classes: Vec<Vec<usize>>,
}

impl Partition {
    /// Validates that the classes are nonempty and pairwise disjoint.
    pub fn new(classes: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for class in &classes {
            if class.is_empty() {
                return Err(Error::InvalidObservable {
                    reason: "empty partition class".into(),
                });
            }
            for &i in class {
                if !seen.insert(i) {
                    return Err(Error::InvalidObservable {
                        reason: format!("index {i} appears in two classes"),
                    });
                }
            }
        }
        let mut classes: Vec<Vec<usize>> = classes
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        classes.sort_by_key(|c| c[0]);
        Ok(Self { classes })
    }

    /// One class per item.
    pub fn singletons(items: &[usize]) -> Self {
        Self::new(items.iter().map(|&i| vec![i]).collect()).expect("distinct items")
    }

    /// A single class holding every item.
    pub fn single_class(items: &[usize]) -> Self {
        Self::new(vec![items.to_vec()]).expect("distinct items")
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn item_count(&self) -> usize {
        self.classes.iter().map(Vec::len).sum()
    }

    /// All items, sorted.
    pub fn items(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.classes.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }

    /// Index of the class containing `item`.
    pub fn class_of(&self, item: usize) -> Option<usize> {
        self.classes
            .iter()
            .position(|c| c.binary_search(&item).is_ok())
    }

    /// Whether every class of `self` lies inside a class of `coarser`
    /// (over the same item set).
    pub fn is_refinement_of(&self, coarser: &Partition) -> bool {
        if self.items() != coarser.items() {
            return false;
        }
        self.classes.iter().all(|class| {
            coarser
                .class_of(class[0])
                .is_some_and(|t| class.iter().all(|&i| coarser.class_of(i) == Some(t)))
        })
    }
}

/// Every partition of `{0, .., n-1}`, enumerated through restricted growth
/// strings. Intended for brute-force checks at small `n`; the count is the
/// Bell number.
pub fn enumerate_partitions(n: usize) -> Vec<Partition> {
    if n == 0 {
        return vec![Partition { classes: vec![] }];
    }
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    loop {
        let class_count = labels.iter().max().copied().unwrap_or(0) + 1;
        let mut classes = vec![Vec::new(); class_count];
        for (i, &l) in labels.iter().enumerate() {
            classes[l].push(i);
        }
        out.push(Partition { classes });

        // Advance to the next restricted growth string.
        let mut pos = n - 1;
        loop {
            if pos == 0 {
                return out;
            }
            let cap = labels[..pos].iter().max().copied().unwrap_or(0) + 1;
            if labels[pos] < cap {
                labels[pos] += 1;
                for l in labels.iter_mut().skip(pos + 1) {
                    *l = 0;
                }
                break;
            }
            pos -= 1;
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    /// Groups `items[i]` by the root of slot `i`.
    fn into_partition(mut self, items: &[usize]) -> Partition {
        let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> =
            std::collections::BTreeMap::new();
        for (slot, &item) in items.iter().enumerate() {
            let root = self.find(slot);
            by_root.entry(root).or_default().push(item);
        }
        Partition::new(by_root.into_values().collect()).expect("disjoint by construction")
    }
}

/// Transitive closure of a symmetric relation over `items`.
fn chain_by(items: &[usize], mut related: impl FnMut(usize, usize) -> bool) -> Partition {
    let mut uf = UnionFind::new(items.len());
    for i in 0..items.len() {
        for j in (i + 1)..items.len() {
            if related(items[i], items[j]) {
                uf.union(i, j);
            }
        }
    }
    uf.into_partition(items)
}

/// Branch indices of `a` that are detectable in `rho`.
fn detectable_branches<T: Scalar>(a: &Observable<T>, rho: &DensityMatrix<T>) -> Result<Vec<usize>> {
    let ps = a.probabilities(rho)?;
    Ok((0..a.branch_count())
        .filter(|&l| ps[l] > T::real(tol::DETECTABLE))
        .collect())
}

/// Merges the branches of `source` according to `partition` (whose items are
/// branch indices of `source`), appending the complement of the merged
/// projectors as an extra undetectable branch when it is nonzero.
fn merge_branches<T: Scalar>(
    source: &Observable<T>,
    partition: &Partition,
) -> Result<Observable<T>> {
    let dim = source.dim();
    let mut projectors = Vec::with_capacity(partition.class_count() + 1);
    let mut covered = CMatrix::zeros(dim, dim);
    for class in partition.classes() {
        let mut p = CMatrix::zeros(dim, dim);
        for &l in class {
            p = p.add(source.projector(l));
        }
        covered = covered.add(&p);
        projectors.push(p);
    }
    let complement = CMatrix::identity(dim).sub(&covered);
    if complement.trace().re > T::real(0.5) {
        projectors.push(complement);
    }
    Observable::from_projectors(projectors)
}

/// Whether every branch projector of `fine` lies inside a branch projector
/// of `coarse` (within `slack`), making `coarse` a structural coarsening.
pub fn refines<T: Scalar>(fine: &Observable<T>, coarse: &Observable<T>, slack: T) -> bool {
    if fine.dim() != coarse.dim() {
        return false;
    }
    fine.branches().iter().all(|fb| {
        coarse
            .branches()
            .iter()
            .any(|cb| cb.projector.mul(&fb.projector).approx_eq(&fb.projector, slack))
    })
}

/// Conditional subsystem-1 reductions of the detectable branches, aligned
/// with `detectable`.
fn branch_reductions<T: Scalar>(
    s: &BipartiteState<T>,
    a2: &Observable<T>,
    detectable: &[usize],
) -> Vec<DensityMatrix<T>> {
    detectable
        .iter()
        .map(|&l| {
            let lifted = tensor_product(&CMatrix::identity(s.d1()), a2.projector(l));
            let (_, cond) = s.conditional(&lifted);
            cond.expect("detectable branch").reduce1()
        })
        .collect()
}

/// Merges detectable branches whose conditional subsystem-1 reductions
/// coincide within [`tol::IDENTITY`] (Frobenius, transitively closed).
/// Returns the coarsened observable and the partition of detectable branch
/// indices that produced it.
pub fn essential_coarsening<T: Scalar>(
    s: &BipartiteState<T>,
    a2: &Observable<T>,
) -> Result<(Observable<T>, Partition)> {
    if a2.dim() != s.d2() {
        return Err(Error::DimensionMismatch {
            context: format!("observable dim {} vs subsystem-2 dim {}", a2.dim(), s.d2()),
        });
    }
    let detectable = detectable_branches(a2, &s.reduce2())?;
    let reductions = branch_reductions(s, a2, &detectable);
    let slack = T::real(tol::IDENTITY);
    let partition = chain_by(&detectable, |i, j| {
        let a = detectable.iter().position(|&x| x == i).expect("item");
        let b = detectable.iter().position(|&x| x == j).expect("item");
        reductions[a]
            .matrix()
            .sub(reductions[b].matrix())
            .frobenius_norm()
            <= slack
    });
    let merged = merge_branches(a2, &partition)?;
    Ok((merged, partition))
}

/// Chains detectable mixture components whose trace overlap
/// `tr(rho_i rho_j)` exceeds `threshold`, transitively closed. The returned
/// partition is over the original component indices.
pub fn m_chained_partition<T: Scalar>(m: &Mixture<T>, threshold: T) -> Partition {
    let detectable: Vec<(usize, &DensityMatrix<T>)> =
        m.detectable().map(|(i, _, rho)| (i, rho)).collect();
    let items: Vec<usize> = detectable.iter().map(|(i, _)| *i).collect();
    chain_by(&items, |i, j| {
        let a = detectable.iter().find(|(k, _)| *k == i).expect("item").1;
        let b = detectable.iter().find(|(k, _)| *k == j).expect("item").1;
        a.matrix().mul(b.matrix()).trace().re.abs() > threshold
    })
}

/// Chains detectable branches of `a` whose cross-block `P_l rho P_l'`
/// exceeds `threshold` in Frobenius norm, transitively closed; merged blocks
/// then commute with `rho` up to the threshold scale.
pub fn o_chained_coarsening<T: Scalar>(
    rho: &DensityMatrix<T>,
    a: &Observable<T>,
    threshold: T,
) -> Result<(Observable<T>, Partition)> {
    if a.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            context: format!("observable dim {} vs state dim {}", a.dim(), rho.dim()),
        });
    }
    let detectable = detectable_branches(a, rho)?;
    let partition = chain_by(&detectable, |i, j| {
        a.projector(i)
            .mul(rho.matrix())
            .mul(a.projector(j))
            .frobenius_norm()
            > threshold
    });
    let merged = merge_branches(a, &partition)?;
    Ok((merged, partition))
}

/// A side-2 observable together with its twin on side 1: branch for branch,
/// interrogating one is indistinguishable from interrogating the other,
/// `(Q_t kron 1) rho = (1 kron P_t) rho`.
#[derive(Clone, Debug)]
pub struct TwinPair<T = f64> {
    /// Twin observable on subsystem 1 (range projectors of the detectable
    /// branch reductions, plus a complement branch when needed).
    pub first: Observable<T>,
    /// The chained observable on subsystem 2.
    pub second: Observable<T>,
    /// Largest Frobenius residual of the twin identity over detectable
    /// branches.
    pub residual: T,
}

/// Chains detectable branches of `b2` whose subsystem-1 reductions have
/// overlapping supports (trace overlap above [`tol::STRUCTURE`]). The
/// surviving classes have perfectly distinguishable reductions, so their
/// range projectors assemble into a twin observable on subsystem 1 when they
/// close to a valid observable.
pub fn twin_coarsening<T: Scalar>(
    s: &BipartiteState<T>,
    b2: &Observable<T>,
) -> Result<(Observable<T>, Partition, Option<TwinPair<T>>)> {
    if b2.dim() != s.d2() {
        return Err(Error::DimensionMismatch {
            context: format!("observable dim {} vs subsystem-2 dim {}", b2.dim(), s.d2()),
        });
    }
    let detectable = detectable_branches(b2, &s.reduce2())?;
    let reductions = branch_reductions(s, b2, &detectable);
    let threshold = T::real(tol::STRUCTURE);
    let partition = chain_by(&detectable, |i, j| {
        let a = detectable.iter().position(|&x| x == i).expect("item");
        let b = detectable.iter().position(|&x| x == j).expect("item");
        reductions[a]
            .matrix()
            .mul(reductions[b].matrix())
            .trace()
            .re
            .abs()
            > threshold
    });
    let merged = merge_branches(b2, &partition)?;

    let twin = build_twin(s, &merged, partition.class_count()).ok();
    Ok((merged, partition, twin))
}

/// Assembles the side-1 twin of the first `detectable_count` branches of
/// `c2` and measures the twin-identity residual.
fn build_twin<T: Scalar>(
    s: &BipartiteState<T>,
    c2: &Observable<T>,
    detectable_count: usize,
) -> Result<TwinPair<T>> {
    let d1 = s.d1();
    let id1 = CMatrix::identity(d1);
    let id2 = CMatrix::identity(s.d2());
    let mut projectors = Vec::with_capacity(detectable_count + 1);
    let mut residual = T::zero();
    for t in 0..detectable_count {
        let lifted = tensor_product(&id1, c2.projector(t));
        let (_, cond) = s.conditional(&lifted);
        let rho1_t = cond
            .ok_or_else(|| Error::InvalidObservable {
                reason: format!("branch {t} lost detectability after merging"),
            })?
            .reduce1();
        let q = range_projector(&rho1_t, T::real(tol::RANK));
        let left = tensor_product(&q, &id2).mul(s.state().matrix());
        let right = lifted.mul(s.state().matrix());
        residual = residual.max(left.sub(&right).frobenius_norm());
        projectors.push(q);
    }
    let mut covered = CMatrix::zeros(d1, d1);
    for q in &projectors {
        covered = covered.add(q);
    }
    let complement = CMatrix::identity(d1).sub(&covered);
    if complement.trace().re > T::real(0.5) {
        projectors.push(complement);
    }
    Ok(TwinPair {
        first: Observable::from_projectors(projectors)?,
        second: c2.clone(),
        residual,
    })
}

/// Entropy grades of the branch statistics of an interrogation, in bits.
/// The five terms sum to the branch entropy `H(p)` of the input observable.
#[derive(Clone, Debug)]
pub struct NoiseLedger<T = f64> {
    /// `H(p) - H(p_ess)`: statistics repeated across branches with identical
    /// conditional reductions.
    pub redundant: T,
    /// `H(p_ess) - J`: statistics the essential branches still cannot
    /// transmit, because their reductions overlap.
    pub essential: T,
    /// `J - H(p_twin)`: gain lost when overlapping branches are chained into
    /// distinguishable classes.
    pub garbled: T,
    /// `H(p_twin) - H(p_qc)`: statistics of distinguishable classes coupled
    /// through the joint state, erased by decohering it.
    pub pure_quantum: T,
    /// `H(p_qc)`: statistics of the commuting blocks, readable without
    /// disturbing the joint state.
    pub quasi_classical: T,
}

impl<T: Scalar> NoiseLedger<T> {
    pub fn total(&self) -> T {
        self.redundant + self.essential + self.garbled + self.pure_quantum + self.quasi_classical
    }
}

/// The full coarsening chain of one interrogating observable, with the
/// partitions that produced each stage, the branch statistics, and the
/// noise ledger.
#[derive(Clone, Debug)]
pub struct CoarseningChain<T = f64> {
    pub input: Observable<T>,
    pub essential: Observable<T>,
    pub twin: Observable<T>,
    pub quasi_classical: Observable<T>,
    /// Detectable input branches merged into essential classes.
    pub essential_partition: Partition,
    /// Detectable essential branches merged into twin classes.
    pub twin_partition: Partition,
    /// Detectable twin branches merged into quasi-classical classes.
    pub quasi_classical_partition: Partition,
    pub twin_pair: Option<TwinPair<T>>,
    pub input_probabilities: Vec<T>,
    pub essential_probabilities: Vec<T>,
    pub twin_probabilities: Vec<T>,
    pub quasi_classical_probabilities: Vec<T>,
    /// Information gain of the essential stage.
    pub essential_gain: T,
    pub ledger: NoiseLedger<T>,
}

impl<T: Scalar> CoarseningChain<T> {
    /// Stages from finest to coarsest.
    pub fn stages(&self) -> [&Observable<T>; 4] {
        [&self.input, &self.essential, &self.twin, &self.quasi_classical]
    }
}

/// Builds the essential, twin, and quasi-classical coarsenings of `a2` and
/// grades the branch entropy into the five-term noise ledger.
pub fn build_chain<T: Scalar>(
    s: &BipartiteState<T>,
    a2: &Observable<T>,
) -> Result<CoarseningChain<T>> {
    if a2.dim() != s.d2() {
        return Err(Error::DimensionMismatch {
            context: format!("observable dim {} vs subsystem-2 dim {}", a2.dim(), s.d2()),
        });
    }
    let rho2 = s.reduce2();

    let (essential, essential_partition) = essential_coarsening(s, a2)?;
    let (twin, twin_partition, twin_pair) = twin_coarsening(s, &essential)?;
    let (quasi_classical, quasi_classical_partition) =
        o_chained_lifted(s, &twin, T::real(tol::STRUCTURE))?;

    let input_probabilities = a2.probabilities(&rho2)?;
    let essential_probabilities = essential.probabilities(&rho2)?;
    let twin_probabilities = twin.probabilities(&rho2)?;
    let quasi_classical_probabilities = quasi_classical.probabilities(&rho2)?;

    let h_input = entropy_of_weights(&input_probabilities);
    let h_essential = entropy_of_weights(&essential_probabilities);
    let h_twin = entropy_of_weights(&twin_probabilities);
    let h_qc = entropy_of_weights(&quasi_classical_probabilities);
    let essential_gain = mutual_info_decomposition(s, &essential)?.information_gain;

    let ledger = NoiseLedger {
        redundant: nonneg(h_input - h_essential),
        essential: nonneg(h_essential - essential_gain),
        garbled: nonneg(essential_gain - h_twin),
        pure_quantum: nonneg(h_twin - h_qc),
        quasi_classical: h_qc,
    };

    Ok(CoarseningChain {
        input: a2.clone(),
        essential,
        twin,
        quasi_classical,
        essential_partition,
        twin_partition,
        quasi_classical_partition,
        twin_pair,
        input_probabilities,
        essential_probabilities,
        twin_probabilities,
        quasi_classical_probabilities,
        essential_gain,
        ledger,
    })
}

/// O-chaining of `c2`'s detectable branches with respect to the joint state,
/// using lifted projectors `1 kron P_t`.
fn o_chained_lifted<T: Scalar>(
    s: &BipartiteState<T>,
    c2: &Observable<T>,
    threshold: T,
) -> Result<(Observable<T>, Partition)> {
    let detectable = detectable_branches(c2, &s.reduce2())?;
    let id1 = CMatrix::identity(s.d1());
    let partition = chain_by(&detectable, |i, j| {
        tensor_product(&id1, c2.projector(i))
            .mul(s.state().matrix())
            .mul(&tensor_product(&id1, c2.projector(j)))
            .frobenius_norm()
            > threshold
    });
    let merged = merge_branches(c2, &partition)?;
    Ok((merged, partition))
}

/// Measured residuals of the defining relation of every chain stage.
#[derive(Clone, Debug)]
pub struct ChainDiagnostics<T = f64> {
    /// Largest Frobenius distance between subsystem-1 reductions inside one
    /// essential class.
    pub essential_within_class_spread: T,
    /// Largest trace overlap between subsystem-1 reductions of distinct twin
    /// classes.
    pub twin_cross_class_overlap: T,
    /// Largest twin-identity residual, when a twin was assembled.
    pub twin_residual: Option<T>,
    /// Largest biorthogonality defect
    /// `||(1 kron P_t) rho (1 kron P_t') - (Q_t kron P_t) rho (Q_t' kron P_t')||`.
    pub twin_block_residual: Option<T>,
    /// Largest cross-block `||(1 kron P_k) rho (1 kron P_k')||` of the
    /// quasi-classical stage.
    pub quasi_cross_block_norm: T,
    /// Discord of the quasi-classical stage.
    pub quasi_discord: T,
    /// `||[1 kron D, rho]||` for the quasi-classical observable matrix.
    pub quasi_commutator_norm: T,
    /// Whether each stage structurally coarsens the previous one.
    pub structural_chain: bool,
}

impl<T: Scalar> CoarseningChain<T> {
    /// Recomputes the defining relations of every stage against `s` and
    /// reports their residuals.
    pub fn diagnostics(&self, s: &BipartiteState<T>) -> Result<ChainDiagnostics<T>> {
        let slack = T::real(tol::STRUCTURE);
        let id1 = CMatrix::identity(s.d1());
        let rho = s.state().matrix();

        // Essential stage: equal reductions inside each class.
        let detectable_in = detectable_branches(&self.input, &s.reduce2())?;
        let reductions_in = branch_reductions(s, &self.input, &detectable_in);
        let slot =
            |l: usize| detectable_in.iter().position(|&x| x == l).expect("detectable");
        let mut essential_within_class_spread = T::zero();
        for class in self.essential_partition.classes() {
            for (a, &i) in class.iter().enumerate() {
                for &j in class.iter().skip(a + 1) {
                    let d = reductions_in[slot(i)]
                        .matrix()
                        .sub(reductions_in[slot(j)].matrix())
                        .frobenius_norm();
                    essential_within_class_spread = essential_within_class_spread.max(d);
                }
            }
        }

        // Twin stage: orthogonal supports across classes.
        let detectable_tw = detectable_branches(&self.twin, &s.reduce2())?;
        let reductions_tw = branch_reductions(s, &self.twin, &detectable_tw);
        let mut twin_cross_class_overlap = T::zero();
        for i in 0..reductions_tw.len() {
            for j in (i + 1)..reductions_tw.len() {
                let overlap = reductions_tw[i]
                    .matrix()
                    .mul(reductions_tw[j].matrix())
                    .trace()
                    .re
                    .abs();
                twin_cross_class_overlap = twin_cross_class_overlap.max(overlap);
            }
        }

        // Twin identity and biorthogonal blocks.
        let (twin_residual, twin_block_residual) = match &self.twin_pair {
            Some(pair) => {
                let mut block = T::zero();
                for (t, &bt) in detectable_tw.iter().enumerate() {
                    for &bu in detectable_tw.iter().skip(t) {
                        let pt = tensor_product(&id1, self.twin.projector(bt));
                        let pu = tensor_product(&id1, self.twin.projector(bu));
                        let qt = tensor_product(
                            pair.first.projector(t),
                            self.twin.projector(bt),
                        );
                        let qu_index = detectable_tw.iter().position(|&x| x == bu).expect("twin");
                        let qu = tensor_product(
                            pair.first.projector(qu_index),
                            self.twin.projector(bu),
                        );
                        let lhs = pt.mul(rho).mul(&pu);
                        let rhs = qt.mul(rho).mul(&qu);
                        block = block.max(lhs.sub(&rhs).frobenius_norm());
                    }
                }
                (Some(pair.residual), Some(block))
            }
            None => (None, None),
        };

        // Quasi-classical stage: vanishing cross blocks and commutation.
        let detectable_qc = detectable_branches(&self.quasi_classical, &s.reduce2())?;
        let mut quasi_cross_block_norm = T::zero();
        for (a, &i) in detectable_qc.iter().enumerate() {
            for &j in detectable_qc.iter().skip(a + 1) {
                let norm = tensor_product(&id1, self.quasi_classical.projector(i))
                    .mul(rho)
                    .mul(&tensor_product(&id1, self.quasi_classical.projector(j)))
                    .frobenius_norm();
                quasi_cross_block_norm = quasi_cross_block_norm.max(norm);
            }
        }
        let lifted_qc = self.quasi_classical.lift(s.d1());
        let quasi_discord = crate::info::discord(s, &self.quasi_classical)?;
        let quasi_commutator_norm = commutator_norm(&lifted_qc.matrix(), rho);

        let structural_chain = refines(&self.input, &self.essential, slack)
            && refines(&self.essential, &self.twin, slack)
            && refines(&self.twin, &self.quasi_classical, slack);

        Ok(ChainDiagnostics {
            essential_within_class_spread,
            twin_cross_class_overlap,
            twin_residual,
            twin_block_residual,
            quasi_cross_block_norm,
            quasi_discord,
            quasi_commutator_norm,
            structural_chain,
        })
    }
}

/// Per-stage decomposition terms along the chain (finest to coarsest) and
/// the residuals of the coherence-information telescopes.
#[derive(Clone, Debug)]
pub struct ChainMonotonicityReport<T = f64> {
    /// Information gain per stage, input first.
    pub gains: Vec<T>,
    /// Discord per stage.
    pub discords: Vec<T>,
    /// Residual correlations per stage.
    pub residuals: Vec<T>,
    /// `|I_C(A, rho2) - sum of stagewise local coherences|`.
    pub local_telescope_residual: T,
    /// Same telescope on the joint state with lifted observables.
    pub global_telescope_residual: T,
}

impl<T: Scalar> ChainMonotonicityReport<T> {
    /// How far the stagewise strings fail to be monotone: gains and discords
    /// must not grow and residuals must not shrink under coarsening.
    pub fn monotonicity_violation(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.gains.len() - 1 {
            worst = worst
                .max(self.gains[i + 1] - self.gains[i])
                .max(self.discords[i + 1] - self.discords[i])
                .max(self.residuals[i] - self.residuals[i + 1]);
        }
        worst.max(T::zero())
    }

    pub fn telescope_residual(&self) -> T {
        self.local_telescope_residual.max(self.global_telescope_residual)
    }

    pub fn check(&self, tol: T) -> Result<()> {
        let t = self.telescope_residual();
        if t > tol {
            return Err(Error::ToleranceExceeded {
                what: "chain coherence telescope".into(),
                residual: t.as_f64(),
                tol: tol.as_f64(),
            });
        }
        let m = self.monotonicity_violation();
        if m > tol {
            return Err(Error::ToleranceExceeded {
                what: "chain monotonicity".into(),
                residual: m.as_f64(),
                tol: tol.as_f64(),
            });
        }
        Ok(())
    }
}

/// Decomposes the mutual information at every stage of the chain and checks
/// that coherence information telescopes: dephasing stage by stage from the
/// coarsest inward loses exactly the coherence of the finest stage,
///
/// ```text
/// I_C(A, rho) = I_C(D, rho) + I_C(C, L_D(rho)) + I_C(B, L_C(rho)) + I_C(A, L_B(rho))
/// ```
///
/// both locally on subsystem 2 and globally on the joint state.
pub fn chain_monotonicity_report<T: Scalar>(
    s: &BipartiteState<T>,
    chain: &CoarseningChain<T>,
) -> Result<ChainMonotonicityReport<T>> {
    let mut gains = Vec::with_capacity(4);
    let mut discords = Vec::with_capacity(4);
    let mut residuals = Vec::with_capacity(4);
    for stage in chain.stages() {
        let d = mutual_info_decomposition(s, stage)?;
        gains.push(d.information_gain);
        discords.push(d.discord);
        residuals.push(d.residual);
    }

    let telescope = |rho: &DensityMatrix<T>, stages: [&Observable<T>; 4]| -> Result<T> {
        let [a, b, c, d] = stages;
        let after_d = luders_mixture(rho, d)?;
        let after_c = luders_mixture(rho, c)?;
        let after_b = luders_mixture(rho, b)?;
        let sum = coherence(d, rho)
            + coherence(c, &after_d)
            + coherence(b, &after_c)
            + coherence(a, &after_b);
        Ok((coherence(a, rho) - sum).abs())
    };

    let rho2 = s.reduce2();
    let local = telescope(
        &rho2,
        [&chain.input, &chain.essential, &chain.twin, &chain.quasi_classical],
    )?;
    let d1 = s.d1();
    let lifted: Vec<Observable<T>> = chain.stages().iter().map(|o| o.lift(d1)).collect();
    let global = telescope(
        s.state(),
        [&lifted[0], &lifted[1], &lifted[2], &lifted[3]],
    )?;

    Ok(ChainMonotonicityReport {
        gains,
        discords,
        residuals,
        local_telescope_residual: local,
        global_telescope_residual: global,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::shannon_entropy;
    use num_complex::Complex;
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

    /// Pure state whose first two branches repeat the same subsystem-1
    /// vector: 1/2 |r,0> + 1/2 |r,1> + (1/sqrt2) |s,2> on 2 x 3.
    fn repeated_branch_state() -> BipartiteState<f64> {
        let h = FRAC_1_SQRT_2;
        BipartiteState::from_pure(
            &[c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)],
            2,
            3,
        )
        .unwrap()
    }

    #[test]
    fn partition_ordering_and_refinement() {
        let p = Partition::new(vec![vec![3], vec![2, 0], vec![1]]).unwrap();
        assert_eq!(p.classes(), &[vec![0, 2], vec![1], vec![3]]);
        assert_eq!(p.class_of(2), Some(0));
        assert_eq!(p.class_of(4), None);
        assert_eq!(p.item_count(), 4);

        let fine = Partition::singletons(&[0, 1, 2, 3]);
        let coarse = Partition::new(vec![vec![0, 2], vec![1, 3]]).unwrap();
        assert!(fine.is_refinement_of(&coarse));
        assert!(!coarse.is_refinement_of(&fine));
        assert!(coarse.is_refinement_of(&Partition::single_class(&[0, 1, 2, 3])));
        // Different item sets never refine each other.
        assert!(!Partition::singletons(&[0, 1]).is_refinement_of(&coarse));

        assert!(Partition::new(vec![vec![0, 1], vec![1]]).is_err());
        assert!(Partition::new(vec![vec![]]).is_err());
    }

    #[test]
    fn partition_enumeration_counts_are_bell_numbers() {
        assert_eq!(enumerate_partitions(0).len(), 1);
        assert_eq!(enumerate_partitions(1).len(), 1);
        assert_eq!(enumerate_partitions(2).len(), 2);
        assert_eq!(enumerate_partitions(3).len(), 5);
        assert_eq!(enumerate_partitions(4).len(), 15);
        assert_eq!(enumerate_partitions(6).len(), 203);

        let all = enumerate_partitions(4);
        for p in &all {
            assert_eq!(p.items(), vec![0, 1, 2, 3]);
        }
        for (i, p) in all.iter().enumerate() {
            for q in all.iter().skip(i + 1) {
                assert_ne!(p, q);
            }
        }
    }

    #[test]
    fn m_chaining_is_transitively_closed() {
        let zero = DensityMatrix::new(M::from_diag(&[1.0, 0.0])).unwrap();
        let one = DensityMatrix::new(M::from_diag(&[0.0, 1.0])).unwrap();
        let plus = DensityMatrix::from_pure(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();

        // |0> overlaps |+| overlaps |1>, but |0> and |1> are orthogonal:
        // the chain still merges all three.
        let m = Mixture::new(vec![
            (0.4, zero.clone()),
            (0.3, plus.clone()),
            (0.3, one.clone()),
        ])
        .unwrap();
        let p = m_chained_partition(&m, 1e-9);
        assert_eq!(p.classes(), &[vec![0, 1, 2]]);

        // Without the bridge the orthogonal pair stays separate.
        let m = Mixture::new(vec![(0.5, zero), (0.5, one)]).unwrap();
        let p = m_chained_partition(&m, 1e-9);
        assert_eq!(p.classes(), &[vec![0], vec![1]]);
    }

    #[test]
    fn m_chaining_skips_undetectable_components() {
        let zero = DensityMatrix::new(M::from_diag(&[1.0, 0.0])).unwrap();
        let one = DensityMatrix::new(M::from_diag(&[0.0, 1.0])).unwrap();
        let m = Mixture::with_gaps(vec![
            (0.5, Some(zero)),
            (0.0, None),
            (0.5, Some(one)),
        ])
        .unwrap();
        let p = m_chained_partition(&m, 1e-9);
        assert_eq!(p.classes(), &[vec![0], vec![2]]);
    }

    #[test]
    fn essential_coarsening_merges_repeated_reductions() {
        let s = repeated_branch_state();
        let (b, partition) = essential_coarsening(&s, &Observable::computational(3)).unwrap();
        assert_eq!(partition.classes(), &[vec![0, 1], vec![2]]);
        assert_eq!(b.branch_count(), 2);
        let resolved: M = b
            .branches()
            .iter()
            .fold(M::zeros(3, 3), |acc, br| acc.add(&br.projector));
        assert!(resolved.approx_eq(&M::identity(3), 1e-12));
        let ps = b.probabilities(&s.reduce2()).unwrap();
        assert!((ps[0] - 0.5).abs() < 1e-12);
        assert!((ps[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn essential_coarsening_keeps_distinct_reductions_apart() {
        let (b, partition) = essential_coarsening(&bell(), &Observable::computational(2)).unwrap();
        assert_eq!(partition.class_count(), 2);
        assert_eq!(b.branch_count(), 2);
    }

    #[test]
    fn undetectable_branches_collect_into_a_complement_branch() {
        // State supported on subsystem-2 levels 0..3 of a 4-level side.
        let h = FRAC_1_SQRT_2;
        let mut v = vec![c(0.0, 0.0); 8];
        v[0] = c(0.5, 0.0);
        v[1] = c(0.5, 0.0);
        v[4 + 2] = c(h, 0.0);
        let s = BipartiteState::from_pure(&v, 2, 4).unwrap();
        let (b, partition) = essential_coarsening(&s, &Observable::computational(4)).unwrap();
        // Detectable branches 0,1 merge (same reduction |r>), 2 stays, and
        // level 3 becomes the undetectable complement branch.
        assert_eq!(partition.classes(), &[vec![0, 1], vec![2]]);
        assert_eq!(b.branch_count(), 3);
        let resolved: M = b
            .branches()
            .iter()
            .fold(M::zeros(4, 4), |acc, br| acc.add(&br.projector));
        assert!(resolved.approx_eq(&M::identity(4), 1e-12));
        let ps = b.probabilities(&s.reduce2()).unwrap();
        assert!(ps[2] < 1e-12);
        assert!((b.projector(2)[(3, 3)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn o_chaining_merges_coherent_blocks_only() {
        // Coherence between levels 0,1; level 2 populated but uncoupled.
        let psi = [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0), c(0.0, 0.0)];
        let pure = DensityMatrix::from_pure(&psi).unwrap().matrix().scale_re(0.6);
        let rest = M::from_diag(&[0.0, 0.0, 0.4]);
        let rho = DensityMatrix::new(pure.add(&rest)).unwrap();
        let (d, partition) =
            o_chained_coarsening(&rho, &Observable::computational(3), 1e-9).unwrap();
        assert_eq!(partition.classes(), &[vec![0, 1], vec![2]]);
        assert_eq!(d.branch_count(), 2);
        // Merged blocks commute with the state.
        assert!(commutator_norm(&d.matrix(), rho.matrix()) < 1e-12);
    }

    #[test]
    fn twin_coarsening_on_bell_yields_matching_computational_twin() {
        let s = bell();
        let (c2, partition, twin) = twin_coarsening(&s, &Observable::computational(2)).unwrap();
        assert_eq!(partition.class_count(), 2);
        assert_eq!(c2.branch_count(), 2);
        let twin = twin.expect("twin must assemble for orthogonal reductions");
        assert!(twin.residual < 1e-12);
        assert_eq!(twin.first.branch_count(), 2);
        // The Bell state's twin of the standard basis is the standard basis.
        assert!(twin.first.projector(0).approx_eq(&M::from_diag(&[1.0, 0.0]), 1e-10));
        assert!(twin.first.projector(1).approx_eq(&M::from_diag(&[0.0, 1.0]), 1e-10));
    }

    #[test]
    fn twin_coarsening_chains_overlapping_reductions() {
        // rho = 1/2 |0><0| kron |0><0| + 1/2 |+><+| kron |1><1|:
        // reductions overlap, so both branches chain into one class.
        let zero = DensityMatrix::new(M::from_diag(&[1.0, 0.0])).unwrap();
        let plus = DensityMatrix::from_pure(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let rho = tensor_product(&zero.matrix(), &M::from_diag(&[1.0, 0.0]))
            .scale_re(0.5)
            .add(&tensor_product(&plus.matrix(), &M::from_diag(&[0.0, 1.0])).scale_re(0.5));
        let s = BipartiteState::new(DensityMatrix::new(rho).unwrap(), 2, 2).unwrap();
        let (c2, partition, twin) = twin_coarsening(&s, &Observable::computational(2)).unwrap();
        assert_eq!(partition.classes(), &[vec![0, 1]]);
        assert!(c2.is_trivial());
        let twin = twin.expect("single-class twin is the range of rho1");
        assert!(twin.residual < 1e-12);
    }

    #[test]
    fn bell_chain_ledger_is_purely_quantum() {
        let s = bell();
        let chain = build_chain(&s, &Observable::computational(2)).unwrap();
        assert_eq!(chain.essential_partition.class_count(), 2);
        assert_eq!(chain.twin_partition.class_count(), 2);
        assert_eq!(chain.quasi_classical_partition.class_count(), 1);
        let l = &chain.ledger;
        assert!(l.redundant < 1e-9);
        assert!(l.essential < 1e-9);
        assert!(l.garbled < 1e-9);
        assert!((l.pure_quantum - 1.0).abs() < 1e-9);
        assert!(l.quasi_classical < 1e-9);
        assert!((l.total() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn classical_classical_chain_ledger_is_quasi_classical() {
        let s = classical_classical();
        let chain = build_chain(&s, &Observable::computational(2)).unwrap();
        let l = &chain.ledger;
        assert!(l.redundant < 1e-9);
        assert!(l.essential < 1e-9);
        assert!(l.garbled < 1e-9);
        assert!(l.pure_quantum < 1e-9);
        assert!((l.quasi_classical - 1.0).abs() < 1e-9);
    }

    #[test]
    fn repeated_branch_chain_has_half_bit_of_redundancy() {
        let s = repeated_branch_state();
        let chain = build_chain(&s, &Observable::computational(3)).unwrap();
        let h_input = shannon_entropy(&[0.25f64, 0.25, 0.5]).unwrap();
        assert!((h_input - 1.5).abs() < 1e-12);
        assert_eq!(chain.essential_partition.classes(), &[vec![0, 1], vec![2]]);
        assert!((chain.essential_gain - 1.0).abs() < 1e-9);
        let l = &chain.ledger;
        assert!((l.redundant - 0.5).abs() < 1e-9);
        assert!(l.essential < 1e-9);
        assert!(l.garbled < 1e-9);
        assert!((l.pure_quantum - 1.0).abs() < 1e-9);
        assert!(l.quasi_classical < 1e-9);
        assert!((l.total() - h_input).abs() < 1e-9);
    }

    #[test]
    fn chain_stages_structurally_refine_and_diagnostics_are_clean() {
        for s in [bell(), classical_classical(), repeated_branch_state()] {
            let a = Observable::computational(s.d2());
            let chain = build_chain(&s, &a).unwrap();
            let d = chain.diagnostics(&s).unwrap();
            assert!(d.structural_chain);
            assert!(d.essential_within_class_spread < 1e-10);
            assert!(d.twin_cross_class_overlap < 1e-10);
            assert!(d.twin_residual.expect("twin exists") < 1e-10);
            assert!(d.twin_block_residual.expect("twin exists") < 1e-10);
            assert!(d.quasi_cross_block_norm < 1e-10);
            assert!(d.quasi_discord < 1e-8);
            assert!(d.quasi_commutator_norm < 1e-9);
        }
    }

    #[test]
    fn chain_report_is_monotone_and_telescopes() {
        for s in [bell(), classical_classical(), repeated_branch_state()] {
            let a = Observable::computational(s.d2());
            let chain = build_chain(&s, &a).unwrap();
            let r = chain_monotonicity_report(&s, &chain).unwrap();
            assert!(r.monotonicity_violation() < 1e-9, "violation {}", r.monotonicity_violation());
            assert!(r.telescope_residual() < 1e-9, "telescope {}", r.telescope_residual());
            r.check(1e-8).unwrap();
        }
    }

    #[test]
    fn chained_partitions_are_the_finest_valid_ones() {
        // Brute force: every partition whose cross-class overlaps vanish must
        // coarsen the chained partition.
        let zero = DensityMatrix::new(M::from_diag(&[1.0, 0.0, 0.0])).unwrap();
        let one = DensityMatrix::new(M::from_diag(&[0.0, 1.0, 0.0])).unwrap();
        let two = DensityMatrix::new(M::from_diag(&[0.0, 0.0, 1.0])).unwrap();
        let mix01 =
            DensityMatrix::new(M::from_diag(&[0.5, 0.5, 0.0])).unwrap();
        let m = Mixture::new(vec![
            (0.25, zero),
            (0.25, one),
            (0.25, two),
            (0.25, mix01),
        ])
        .unwrap();
        let chained = m_chained_partition(&m, 1e-9);
        assert_eq!(chained.classes(), &[vec![0, 1, 3], vec![2]]);

        let states: Vec<&DensityMatrix<f64>> = m.detectable().map(|(_, _, r)| r).collect();
        let valid = |p: &Partition| -> bool {
            p.classes().iter().enumerate().all(|(a, ca)| {
                p.classes().iter().skip(a + 1).all(|cb| {
                    ca.iter().all(|&i| {
                        cb.iter().all(|&j| {
                            states[i].matrix().mul(states[j].matrix()).trace().re.abs() <= 1e-9
                        })
                    })
                })
            })
        };
        assert!(valid(&chained));
        for p in enumerate_partitions(4) {
            if valid(&p) {
                assert!(chained.is_refinement_of(&p));
            }
        }
    }

    #[test]
    fn refines_checks_projector_containment() {
        let fine = Observable::<f64>::computational(3);
        let coarse = Observable::from_projectors(vec![
            M::from_diag(&[1.0, 1.0, 0.0]),
            M::from_diag(&[0.0, 0.0, 1.0]),
        ])
        .unwrap();
        assert!(refines(&fine, &coarse, 1e-9));
        assert!(!refines(&coarse, &fine, 1e-9));
        assert!(refines(&coarse, &Observable::trivial(3), 1e-9));
    }
}
