//! Thin wrappers around nalgebra decompositions with deterministic ordering.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Hermitian eigendecomposition with eigenvalues sorted in descending order
/// and eigenvectors permuted to match.
pub struct HermitianEigen {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

pub fn hermitian_eigen(m: &CMatrix) -> HermitianEigen {
    assert_eq!(m.nrows(), m.ncols(), "hermitian_eigen: square matrix");
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    HermitianEigen { values, vectors }
}

/// Singular values sorted descending, with matching right singular vectors
/// as columns.
pub struct SvdParts {
    pub values: Vec<f64>,
    pub right_vectors: CMatrix,
}

pub fn svd_sorted(m: &CMatrix) -> SvdParts {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("svd: right vectors requested");
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    // Rows of v_t are conjugated right singular vectors.
    let mut right = CMatrix::zeros(m.ncols(), k);
    for (dst, &src) in order.iter().enumerate() {
        let row = v_t.row(src);
        for c in 0..m.ncols() {
            right[(c, dst)] = row[c].conj();
        }
    }
    SvdParts {
        values,
        right_vectors: right,
    }
}

/// Singular values only, sorted descending.
pub fn singular_values_sorted(m: &CMatrix) -> Vec<f64> {
    let svd = m.clone().svd(false, false);
    let mut vals: Vec<f64> = svd.singular_values.iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

/// Smallest singular value of a (possibly rectangular) matrix.
pub fn min_singular_value(m: &CMatrix) -> f64 {
    singular_values_sorted(m).last().copied().unwrap_or(0.0)
}

/// Squared Frobenius norm.
pub fn frobenius_sq(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Hermitian part `(m + m^H) / 2`, used to scrub accumulation asymmetry
/// before eigensolves.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    let mh = m.adjoint();
    (m + mh).map(|z| z * 0.5)
}

/// Orthonormalizes the columns of `m` with modified Gram-Schmidt. Returns the
/// rank actually achieved at the given drop tolerance.
pub fn orthonormalize_columns(m: &mut CMatrix, drop_tol: f64) -> usize {
    let ncols = m.ncols();
    let mut rank = 0;
    for j in 0..ncols {
        let mut col = m.column(j).clone_owned();
        for i in 0..rank {
            let q = m.column(i);
            let proj: Complex64 = q.iter().zip(col.iter()).map(|(a, b)| a.conj() * b).sum();
            col.iter_mut()
                .zip(q.iter())
                .for_each(|(c, a)| *c -= proj * a);
        }
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > drop_tol {
            col /= Complex64::new(norm, 0.0);
            m.set_column(rank, &col);
            rank += 1;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigen_sorted_desc() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![
            c(1.0, 0.0),
            c(3.0, 0.0),
            c(2.0, 0.0),
        ]));
        let eig = hermitian_eigen(&m);
        assert_relative_eq!(eig.values[0], 3.0);
        assert_relative_eq!(eig.values[1], 2.0);
        assert_relative_eq!(eig.values[2], 1.0);
    }

    #[test]
    fn eigen_reconstructs_hermitian() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c(2.0, 0.0), c(0.5, 0.25), c(0.5, -0.25), c(1.0, 0.0)],
        );
        let eig = hermitian_eigen(&m);
        let lam = CMatrix::from_diagonal(&eig.values.map(|x| c(x, 0.0)));
        let rec = &eig.vectors * lam * eig.vectors.adjoint();
        assert!((rec - m).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn svd_right_vectors_consistent() {
        let m =
            CMatrix::from_row_slice(2, 2, &[c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(4.0, 1.0)]);
        let parts = svd_sorted(&m);
        for (i, &s) in parts.values.iter().enumerate() {
            let v = parts.right_vectors.column(i).clone_owned();
            let mv = &m * &v;
            assert_relative_eq!(mv.norm(), s, epsilon = 1e-10);
        }
        assert!(parts.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn gram_schmidt_rank() {
        let mut m = CMatrix::from_row_slice(
            3,
            2,
            &[
                c(1.0, 0.0),
                c(1.0, 0.0),
                c(0.0, 0.0),
                c(1.0, 0.0),
                c(2.0, 0.0),
                c(0.0, 0.0),
            ],
        );
        let rank = orthonormalize_columns(&mut m, 1e-12);
        assert_eq!(rank, 2);
        let q = m.columns(0, 2);
        let gram = q.adjoint() * q;
        assert!((gram - CMatrix::identity(2, 2))
            .iter()
            .all(|z| z.norm() < 1e-12));

        // Dependent second column collapses to rank 1.
        let mut dep =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(orthonormalize_columns(&mut dep, 1e-12), 1);
    }
}
