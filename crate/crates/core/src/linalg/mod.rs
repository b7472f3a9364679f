//! Dense complex matrices and the numerical kernels built on them.
//!
//! Storage is row-major. Composite systems follow the Kronecker convention in
//! which the first factor carries the slow (leftmost) index:
//!
//! ```text
//! kron(a, b)[(i1*db + i2, j1*db + j2)] = a[(i1, j1)] * b[(i2, j2)]
//! ```
//!
//! so a bipartite density matrix on `d1 x d2` flattens indices as
//! `i = i1*d2 + i2`. All reductions and lifts in the crate rely on this
//! single convention.

mod eigen;

pub use eigen::{hermitian_eigendecomposition, HermitianEigen};

use core::fmt;
use core::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Builds from nested rows; all rows must share one length.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let nr = rows.len();
        let nc = rows.first().map_or(0, Vec::len);
        for row in rows {
            if row.len() != nc {
                return Err(Error::ShapeMismatch {
                    left_rows: nr,
                    left_cols: nc,
                    right_rows: 1,
                    right_cols: row.len(),
                });
            }
        }
        Ok(Self {
            rows: nr,
            cols: nc,
            data: rows.concat(),
        })
    }

    /// Real diagonal matrix.
    pub fn from_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, T::zero());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    fn assert_same_shape(&self, other: &Self, op: &str) {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "{op}: shape {}x{} vs {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_shape(other, "add");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same_shape(other, "sub");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn scale_re(&self, factor: T) -> Self {
        self.scale(Complex::new(factor, T::zero()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert!(
            self.cols == other.rows,
            "mul: inner dimensions {} vs {}",
            self.cols,
            other.rows
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    out[(r, c)] = out[(r, c)] + a * other[(k, c)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert!(self.cols == v.len(), "matvec: {} cols vs {}", self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let mut acc = Complex::zero();
                for c in 0..self.cols {
                    acc = acc + self[(r, c)] * v[c];
                }
                acc
            })
            .collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn trace(&self) -> Complex<T> {
        debug_assert!(self.is_square());
        let mut acc = Complex::zero();
        for i in 0..self.rows {
            acc = acc + self[(i, i)];
        }
        acc
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    /// `||m - m^H||_F`, the distance from the Hermitian cone.
    pub fn hermitian_deviation(&self) -> T {
        debug_assert!(self.is_square());
        self.sub(&self.adjoint()).frobenius_norm()
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.is_square() && self.hermitian_deviation() <= tol
    }

    /// `(m + m^H) / 2`; used to scrub tolerated asymmetry before spectral work.
    pub fn hermitian_part(&self) -> Self {
        self.add(&self.adjoint()).scale_re(T::real(0.5))
    }

    /// Entrywise closeness in Frobenius norm; `false` on shape mismatch.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.sub(other).frobenius_norm() <= tol
    }

    /// Traces out all subsystems not listed in `keep`.
    ///
    /// `dims` are the subsystem dimensions in slow-to-fast order and must
    /// multiply to the matrix dimension; `keep` lists subsystem indices in
    /// strictly increasing order. Kept subsystems retain their relative order.
    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        let total: usize = dims.iter().product();
        if !self.is_square() || self.rows != total || dims.iter().any(|&d| d == 0) {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "partial_trace: matrix is {}x{}, subsystem dims {:?}",
                    self.rows, self.cols, dims
                ),
            });
        }
        if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= dims.len()) {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "partial_trace: keep set {:?} invalid for {} subsystems",
                    keep,
                    dims.len()
                ),
            });
        }

        let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
        let mut stride = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            stride[i] = stride[i + 1] * dims[i + 1];
        }

        // Flat offsets of every kept and traced multi-index, slow-to-fast.
        let offsets = |subs: &[usize]| -> Vec<usize> {
            let count: usize = subs.iter().map(|&i| dims[i]).product();
            (0..count)
                .map(|mut flat| {
                    let mut off = 0;
                    for &i in subs.iter().rev() {
                        off += (flat % dims[i]) * stride[i];
                        flat /= dims[i];
                    }
                    off
                })
                .collect()
        };
        let keep_off = offsets(keep);
        let trace_off = offsets(&traced);

        let dk = keep_off.len();
        let mut out = Self::zeros(dk, dk);
        for (rk, &ro) in keep_off.iter().enumerate() {
            for (ck, &co) in keep_off.iter().enumerate() {
                let mut acc = Complex::zero();
                for &to in &trace_off {
                    acc = acc + self[(ro + to, co + to)];
                }
                out[(rk, ck)] = acc;
            }
        }
        Ok(out)
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;

    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[r * self.cols + c]
    }
}

impl<T: fmt::Debug> fmt::Debug for CMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = &self[(r, c)];
                write!(f, "{:?}{:+?}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product with the first factor slow: block `(i1, j1)` of the
/// result is `a[(i1, j1)] * b`.
pub fn tensor_product<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let mut out = CMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i1 in 0..a.rows() {
        for j1 in 0..a.cols() {
            let f = a[(i1, j1)];
            if f.is_zero() {
                continue;
            }
            for i2 in 0..b.rows() {
                for j2 in 0..b.cols() {
                    out[(i1 * b.rows() + i2, j1 * b.cols() + j2)] = f * b[(i2, j2)];
                }
            }
        }
    }
    out
}

/// `||a - b||_F`.
pub fn frobenius_distance<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<T> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::ShapeMismatch {
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }
    Ok(a.sub(b).frobenius_norm())
}

/// `ab - ba`.
pub fn commutator<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a.mul(b).sub(&b.mul(a))
}

/// `||ab - ba||_F`.
pub fn commutator_norm<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    commutator(a, b).frobenius_norm()
}

/// Inner product, conjugate-linear in the first argument.
pub fn inner<T: Scalar>(u: &[Complex<T>], v: &[Complex<T>]) -> Complex<T> {
    debug_assert_eq!(u.len(), v.len());
    u.iter()
        .zip(v)
        .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
}

pub fn vec_norm<T: Scalar>(u: &[Complex<T>]) -> T {
    u.iter()
        .map(|z| z.norm_sqr())
        .fold(T::zero(), |a, b| a + b)
        .sqrt()
}

/// Rank-one matrix `|u><v|`.
pub fn outer<T: Scalar>(u: &[Complex<T>], v: &[Complex<T>]) -> CMatrix<T> {
    CMatrix::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
}

/// Kronecker product of column vectors, first factor slow.
pub fn tensor_vec<T: Scalar>(u: &[Complex<T>], v: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut out = Vec::with_capacity(u.len() * v.len());
    for a in u {
        for b in v {
            out.push(a * b);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = CMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn sigma_z() -> M {
        M::from_diag(&[1.0, -1.0])
    }

    fn sigma_x() -> M {
        M::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]).unwrap()
    }

    #[test]
    fn identity_times_matrix_is_matrix() {
        let a = sigma_x();
        assert!(M::identity(2).mul(&a).approx_eq(&a, 0.0));
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let a = M::from_rows(&[vec![c(1.0, 2.0), c(0.0, -1.0)], vec![c(3.0, 0.0), c(0.0, 4.0)]])
            .unwrap();
        let ad = a.adjoint();
        assert_eq!(ad[(0, 0)], c(1.0, -2.0));
        assert_eq!(ad[(1, 0)], c(0.0, 1.0));
        assert_eq!(ad[(0, 1)], c(3.0, 0.0));
    }

    #[test]
    fn kron_of_identities_is_identity() {
        assert!(tensor_product(&M::identity(2), &M::identity(3)).approx_eq(&M::identity(6), 0.0));
    }

    #[test]
    fn kron_diagonal_signs() {
        let zz = tensor_product(&sigma_z(), &sigma_z());
        let expected = M::from_diag(&[1.0, -1.0, -1.0, 1.0]);
        assert!(zz.approx_eq(&expected, 0.0));
    }

    #[test]
    fn kron_projector_placement() {
        // |0><0| kron |1><1| puts the single unit entry at row 1, col 1:
        // the first factor is the slow index.
        let p0 = M::from_diag(&[1.0, 0.0]);
        let p1 = M::from_diag(&[0.0, 1.0]);
        let k = tensor_product(&p0, &p1);
        for r in 0..4 {
            for cidx in 0..4 {
                let expected = if r == 1 && cidx == 1 { 1.0 } else { 0.0 };
                assert_eq!(k[(r, cidx)], c(expected, 0.0));
            }
        }
    }

    #[test]
    fn kron_mixed_product_property() {
        let a = M::from_rows(&[vec![c(1.0, 1.0), c(0.5, 0.0)], vec![c(0.0, -2.0), c(3.0, 0.0)]])
            .unwrap();
        let b = M::from_rows(&[vec![c(2.0, 0.0), c(0.0, 1.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        let lhs = tensor_product(&a, &b).mul(&tensor_product(&b, &a));
        let rhs = tensor_product(&a.mul(&b), &b.mul(&a));
        assert!(lhs.approx_eq(&rhs, 1e-12));
    }

    #[test]
    fn partial_trace_of_product_factors() {
        let rho = M::from_diag(&[0.25, 0.75]);
        let sigma = M::from_rows(&[
            vec![c(0.5, 0.0), c(0.1, 0.2)],
            vec![c(0.1, -0.2), c(0.5, 0.0)],
        ])
        .unwrap();
        let joint = tensor_product(&rho, &sigma);
        let back1 = joint.partial_trace(&[2, 2], &[0]).unwrap();
        let back2 = joint.partial_trace(&[2, 2], &[1]).unwrap();
        assert!(back1.approx_eq(&rho, 1e-14));
        assert!(back2.approx_eq(&sigma, 1e-14));
    }

    #[test]
    fn partial_trace_of_maximally_entangled_pair_is_maximally_mixed() {
        // (|00> + |11>)/sqrt(2) written out as a 4x4 projector by hand.
        let mut bell = M::zeros(4, 4);
        for &r in &[0usize, 3] {
            for &cc in &[0usize, 3] {
                bell[(r, cc)] = c(0.5, 0.0);
            }
        }
        let half = M::identity(2).scale_re(0.5);
        assert!(bell.partial_trace(&[2, 2], &[1]).unwrap().approx_eq(&half, 1e-15));
        assert!(bell.partial_trace(&[2, 2], &[0]).unwrap().approx_eq(&half, 1e-15));
    }

    #[test]
    fn partial_trace_composes_across_three_subsystems() {
        let a = M::from_diag(&[0.3, 0.7]);
        let b = M::from_rows(&[
            vec![c(0.6, 0.0), c(0.0, 0.3)],
            vec![c(0.0, -0.3), c(0.4, 0.0)],
        ])
        .unwrap();
        let d = M::from_diag(&[0.9, 0.1]);
        let abc = tensor_product(&tensor_product(&a, &b), &d);
        let via_two_steps = abc
            .partial_trace(&[2, 2, 2], &[0, 1])
            .unwrap()
            .partial_trace(&[2, 2], &[0])
            .unwrap();
        let direct = abc.partial_trace(&[2, 2, 2], &[0]).unwrap();
        assert!(via_two_steps.approx_eq(&direct, 1e-13));
    }

    #[test]
    fn frobenius_norm_values() {
        assert!((sigma_z().scale_re(2.0).frobenius_norm() - 8.0f64.sqrt()).abs() < 1e-15);
        let d = frobenius_distance(&M::zeros(2, 2), &M::identity(2)).unwrap();
        assert!((d - 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn frobenius_distance_rejects_shape_mismatch() {
        let err = frobenius_distance(&M::zeros(2, 2), &M::zeros(3, 3)).unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch { .. }));
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let err = M::identity(4).partial_trace(&[2, 3], &[0]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn commutator_of_pauli_pair() {
        // [sigma_z, sigma_x] = 2i sigma_y, norm 2*sqrt(2).
        let n = commutator_norm(&sigma_z(), &sigma_x());
        assert!((n - 8.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn outer_and_inner_agree() {
        let u = vec![c(0.6, 0.0), c(0.0, 0.8)];
        let v = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let m = outer(&u, &v);
        assert_eq!(m[(1, 0)], c(0.0, 0.8));
        assert_eq!(inner(&v, &u), c(0.6, 0.0));
        assert!((vec_norm(&u) - 1.0).abs() < 1e-15);
    }
}
